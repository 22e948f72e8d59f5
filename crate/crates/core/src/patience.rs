//! Patience sorting on decks with repeated values, Foata's intercalation product, and
//! the records-to-cycles bijection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::rat_int;
use crate::error::{Error, Result};
use crate::report::{CheckResult, Report};
use crate::series::{SeriesRing, TruncatedSeries};

/// How symbols are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// 1, 2, 3, …
    Integers,
    /// a, b, c, … standing for 1, 2, 3, …
    Letters,
}

/// A word over a linearly ordered alphabet; symbols are positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultisetWord {
    symbols: Vec<u32>,
}

impl MultisetWord {
    pub fn new(symbols: Vec<u32>) -> Self {
        MultisetWord { symbols }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Multiplicity vector a⃗: `a[i-1]` copies of symbol i.
    pub fn mults(&self) -> Vec<usize> {
        let top = self.symbols.iter().copied().max().unwrap_or(0) as usize;
        let mut a = vec![0; top];
        for &s in &self.symbols {
            a[s as usize - 1] += 1;
        }
        a
    }

    pub fn reversed(&self) -> Self {
        MultisetWord::new(self.symbols.iter().rev().copied().collect())
    }

    /// Parses space-separated tokens, all integers or all single letters.
    pub fn parse(s: &str) -> Result<(Self, Alphabet)> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        let letters = tokens
            .iter()
            .all(|t| t.len() == 1 && t.chars().all(|c| c.is_ascii_lowercase()));
        if letters {
            let symbols = tokens
                .iter()
                .map(|t| t.as_bytes()[0] as u32 - b'a' as u32 + 1)
                .collect();
            return Ok((MultisetWord::new(symbols), Alphabet::Letters));
        }
        let symbols = tokens
            .iter()
            .map(|t| match t.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::Parse(format!("bad symbol '{t}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((MultisetWord::new(symbols), Alphabet::Integers))
    }

    pub fn render(&self, alphabet: Alphabet) -> String {
        render_symbols(&self.symbols, alphabet)
    }
}

impl FromStr for MultisetWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(MultisetWord::parse(s)?.0)
    }
}

pub fn render_symbol(s: u32, alphabet: Alphabet) -> String {
    match alphabet {
        Alphabet::Integers => s.to_string(),
        Alphabet::Letters => ((b'a' + (s - 1) as u8) as char).to_string(),
    }
}

pub fn render_symbols(symbols: &[u32], alphabet: Alphabet) -> String {
    symbols
        .iter()
        .map(|&s| render_symbol(s, alphabet))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieRule {
    /// A card may go on a card of equal value.
    Allowed,
    /// Piles strictly decrease from bottom to top.
    Forbidden,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "allowed" => Ok(TieRule::Allowed),
            "forbidden" => Ok(TieRule::Forbidden),
            other => Err(Error::Parse(format!("unknown tie rule '{other}'"))),
        }
    }
}

/// Piles after dealing the word left to right, each pile listed bottom to top.
pub fn patience_piles(word: &MultisetWord, tie: TieRule) -> Vec<Vec<u32>> {
    let mut piles: Vec<Vec<u32>> = Vec::new();
    for &card in &word.symbols {
        let fits = |top: u32| match tie {
            TieRule::Allowed => top >= card,
            TieRule::Forbidden => top > card,
        };
        match piles.iter_mut().find(|p| fits(*p.last().unwrap())) {
            Some(p) => p.push(card),
            None => piles.push(vec![card]),
        }
    }
    piles
}

/// Pile sizes P_1, P_2, … after dealing the word left to right.
pub fn patience_play(word: &MultisetWord, tie: TieRule) -> Vec<usize> {
    patience_piles(word, tie).iter().map(Vec::len).collect()
}

/// Left-to-right minima: weak (≤ all earlier) for ties allowed, strict otherwise.
pub fn left_to_right_minima(symbols: &[u32], tie: TieRule) -> Vec<usize> {
    let mut out = Vec::new();
    let mut best: Option<u32> = None;
    for (i, &s) in symbols.iter().enumerate() {
        let record = match (best, tie) {
            (None, _) => true,
            (Some(b), TieRule::Allowed) => s <= b,
            (Some(b), TieRule::Forbidden) => s < b,
        };
        if record {
            out.push(i + 1);
            best = Some(s);
        }
    }
    out
}

/// A two-line multiset permutation: column j sends top[j] to bottom[j].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoLine {
    pub top: Vec<u32>,
    pub bottom: Vec<u32>,
}

impl TwoLine {
    pub fn new(top: Vec<u32>, bottom: Vec<u32>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::SizeMismatch {
                left: top.len(),
                right: bottom.len(),
            });
        }
        let (mut a, mut b) = (top.clone(), bottom.clone());
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::InvalidArgument("top and bottom lines differ as multisets".into()));
        }
        Ok(TwoLine { top, bottom })
    }

    /// Bottom line under the sorted top line.
    pub fn from_word(word: &MultisetWord) -> Self {
        let mut top = word.symbols.clone();
        top.sort_unstable();
        TwoLine {
            top,
            bottom: word.symbols.clone(),
        }
    }

    pub fn empty() -> Self {
        TwoLine {
            top: Vec::new(),
            bottom: Vec::new(),
        }
    }

    pub fn word(&self) -> MultisetWord {
        MultisetWord::new(self.bottom.clone())
    }

    pub fn render(&self, alphabet: Alphabet) -> String {
        format!(
            "{}\n{}",
            render_symbols(&self.top, alphabet),
            render_symbols(&self.bottom, alphabet)
        )
    }
}

/// Intercalation product: juxtapose columns, then stably sort by the top line.
pub fn foata_product(alpha: &TwoLine, beta: &TwoLine) -> TwoLine {
    let mut cols: Vec<(u32, u32)> = alpha
        .top
        .iter()
        .zip(&alpha.bottom)
        .chain(beta.top.iter().zip(&beta.bottom))
        .map(|(&t, &b)| (t, b))
        .collect();
    cols.sort_by_key(|c| c.0);
    TwoLine {
        top: cols.iter().map(|c| c.0).collect(),
        bottom: cols.iter().map(|c| c.1).collect(),
    }
}

/// A cycle (x_1 … x_m y) with y < every x_j.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    pub xs: Vec<u32>,
    pub y: u32,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.xs.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// From the written order x_1 … x_m y.
    pub fn from_written(letters: &[u32]) -> Result<Self> {
        let (&y, xs) = letters
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("empty cycle".into()))?;
        if xs.iter().any(|&x| x <= y) {
            return Err(Error::InvalidArgument("a cycle must end in its strict minimum".into()));
        }
        Ok(Cycle { xs: xs.to_vec(), y })
    }

    pub fn written(&self) -> Vec<u32> {
        let mut v = self.xs.clone();
        v.push(self.y);
        v
    }

    /// Columns x_1→x_2, …, x_m→y, y→x_1.
    pub fn two_line(&self) -> TwoLine {
        let w = self.written();
        let m = w.len();
        TwoLine {
            top: w.clone(),
            bottom: (0..m).map(|j| w[(j + 1) % m]).collect(),
        }
    }
}

/// Foata factorization, cycles in product order (y_1 ≤ y_2 ≤ …).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Intercalation {
    pub cycles: Vec<Cycle>,
}

impl Intercalation {
    pub fn product(&self) -> TwoLine {
        self.cycles
            .iter()
            .fold(TwoLine::empty(), |acc, c| foata_product(&acc, &c.two_line()))
    }

    pub fn render(&self, alphabet: Alphabet) -> String {
        self.cycles
            .iter()
            .map(|c| format!("({})", render_symbols(&c.written(), alphabet)))
            .collect::<Vec<_>>()
            .join(" T ")
    }

    pub fn stats(&self) -> CycleStats {
        let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
        let mut minima_by_length: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        let mut minima = BTreeSet::new();
        for c in &self.cycles {
            *by_length.entry(c.len()).or_insert(0) += 1;
            minima_by_length.entry(c.len()).or_default().insert(c.y);
            minima.insert(c.y);
        }
        CycleStats {
            c: self.cycles.len(),
            c_prime: minima.len(),
            by_length,
            by_length_prime: minima_by_length
                .into_iter()
                .map(|(i, s)| (i, s.len()))
                .collect(),
        }
    }
}

/// C, C′ and the per-length counts C_i, C′_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStats {
    pub c: usize,
    /// Number of distinct cycle minima.
    pub c_prime: usize,
    pub by_length: BTreeMap<usize, usize>,
    /// For each length, the number of distinct minima among cycles of that length.
    pub by_length_prime: BTreeMap<usize, usize>,
}

/// Factors a multiset permutation (bottom line against the sorted top).
pub fn foata_decompose(word: &MultisetWord) -> Intercalation {
    let two = TwoLine::from_word(word);
    let n = two.top.len();
    let mut used = vec![false; n];
    let first_unused = |used: &[bool], letter: u32| -> usize {
        let start = two.top.partition_point(|&t| t < letter);
        (start..n)
            .find(|&j| two.top[j] == letter && !used[j])
            .expect("every letter keeps a column until its cycle closes")
    };
    let mut cycles = Vec::new();
    while let Some(start) = (0..n).find(|&j| !used[j]) {
        // columns are sorted, so the first unused column carries the smallest letter left
        let y = two.top[start];
        used[start] = true;
        let mut xs = Vec::new();
        let mut cur = two.bottom[start];
        while cur != y {
            xs.push(cur);
            let j = first_unused(&used, cur);
            used[j] = true;
            cur = two.bottom[j];
        }
        cycles.push(Cycle { xs, y });
    }
    Intercalation { cycles }
}

/// Φ: cut the word after each weak right-to-left minimum; each piece, ending in its
/// minimum, is a cycle.
pub fn phi_bijection(word: &MultisetWord) -> Intercalation {
    let s = &word.symbols;
    let n = s.len();
    // weak left-to-right minima of the reversal are weak right-to-left minima here
    let mut ends: Vec<usize> = left_to_right_minima(&word.reversed().symbols, TieRule::Allowed)
        .into_iter()
        .map(|r| n - r)
        .collect();
    ends.sort_unstable();
    let mut cycles = Vec::with_capacity(ends.len());
    let mut start = 0;
    for e in ends {
        cycles.push(Cycle::from_written(&s[start..=e]).expect("pieces end at their strict minimum"));
        start = e + 1;
    }
    Intercalation { cycles }
}

/// P_1 and P_1′ as used with Φ: the first pile when the deck is dealt from π^rev.
pub fn first_pile_of_reversal(word: &MultisetWord, tie: TieRule) -> usize {
    patience_play(&word.reversed(), tie)
        .first()
        .copied()
        .unwrap_or(0)
}

/// All distinct rearrangements of the multiset with multiplicities `a`.
pub fn multiset_words(a: &[usize]) -> Vec<MultisetWord> {
    let mut cur: Vec<u32> = a
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat_n(i as u32 + 1, m))
        .collect();
    let mut out = vec![MultisetWord::new(cur.clone())];
    while next_permutation(&mut cur) {
        out.push(MultisetWord::new(cur.clone()));
    }
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
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

/// All N^n words of length n over 1..=N.
pub fn all_words(n: usize, letters: u32) -> Vec<MultisetWord> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=letters).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(MultisetWord::new).collect()
}

/// Closed form for the mean first pile over Mult(a⃗).
pub fn expected_first_pile(a: &[usize], tie: TieRule) -> BigRational {
    let mut total = BigRational::zero();
    let mut before = 0usize;
    for &ak in a {
        if ak > 0 {
            let den = match tie {
                TieRule::Allowed => before + 1,
                TieRule::Forbidden => before + ak,
            };
            total += BigRational::new(BigInt::from(ak), BigInt::from(den));
        }
        before += ak;
    }
    total
}

/// Exhaustive mean of the first pile over Mult(a⃗), dealing left to right.
pub fn average_first_pile(a: &[usize], tie: TieRule) -> BigRational {
    let words = multiset_words(a);
    let sum: usize = words
        .iter()
        .map(|w| patience_play(w, tie).first().copied().unwrap_or(0))
        .sum();
    BigRational::new(BigInt::from(sum), BigInt::from(words.len()))
}

/// Σ_{π fixed-point-free involution of S_{2n}} x^{P_1(π)}, coefficients by exponent.
pub fn involution_firstpile_poly(n: usize) -> Result<Vec<BigInt>> {
    if 2 * n > 12 {
        return Err(Error::EnumerationCap { n: 2 * n, cap: 12 });
    }
    let mut poly = vec![BigInt::zero(); 2 * n + 1];
    let mut line = vec![0u32; 2 * n];
    fn rec(line: &mut Vec<u32>, poly: &mut Vec<BigInt>) {
        let Some(i) = line.iter().position(|&v| v == 0) else {
            let p = patience_play(&MultisetWord::new(line.clone()), TieRule::Forbidden)[0];
            poly[p] += 1;
            return;
        };
        for j in i + 1..line.len() {
            if line[j] == 0 {
                line[i] = j as u32 + 1;
                line[j] = i as u32 + 1;
                rec(line, poly);
                line[i] = 0;
                line[j] = 0;
            }
        }
    }
    if n > 0 {
        rec(&mut line, &mut poly);
    } else {
        poly[0] = BigInt::one();
    }
    Ok(poly)
}

/// Π_{i=1}^n (x² + 2(i−1)).
pub fn involution_product_poly(n: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for i in 1..=n {
        let c = BigInt::from(2 * (i - 1));
        let mut next = vec![BigInt::zero(); poly.len() + 2];
        for (e, p) in poly.iter().enumerate() {
            next[e + 2] += p;
            next[e] += p * &c;
        }
        poly = next;
    }
    poly
}

pub fn render_poly(poly: &[BigInt]) -> String {
    let terms: Vec<String> = poly
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| format!("{c}*x^{e}"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Which generating function identity to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenfuncIdentity {
    /// u^C over all multisets.
    MultisetC,
    /// u^{C′} over all multisets.
    MultisetCPrime,
    /// Π u_i^{C_i} over words, x_k marking letters.
    Words1,
    /// Π u_i^{C_i} over words, x marking length, with the (1 − x) prefactor.
    Words2,
    /// Π u_i^{C′_i} over words, x_k marking letters.
    Words3,
    /// Π u_i^{C′_i} over words, x marking length, with the (1 − x) prefactor.
    Words4,
}

impl GenfuncIdentity {
    pub const ALL: [GenfuncIdentity; 6] = [
        GenfuncIdentity::MultisetC,
        GenfuncIdentity::MultisetCPrime,
        GenfuncIdentity::Words1,
        GenfuncIdentity::Words2,
        GenfuncIdentity::Words3,
        GenfuncIdentity::Words4,
    ];
}

impl fmt::Display for GenfuncIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenfuncIdentity::MultisetC => "multiset_C",
            GenfuncIdentity::MultisetCPrime => "multiset_C'",
            GenfuncIdentity::Words1 => "words_1",
            GenfuncIdentity::Words2 => "words_2",
            GenfuncIdentity::Words3 => "words_3",
            GenfuncIdentity::Words4 => "words_4",
        })
    }
}

/// Left side, the right side as displayed, and a corrected right side.
pub struct GenfuncSides {
    pub lhs: TruncatedSeries,
    pub printed: TruncatedSeries,
    pub corrected: TruncatedSeries,
}

struct GfRing {
    ring: Arc<SeriesRing>,
    one: TruncatedSeries,
}

impl GfRing {
    fn var(&self, name: &str) -> TruncatedSeries {
        TruncatedSeries::var(&self.ring, name).expect("declared variable")
    }

    fn inv(&self, s: &TruncatedSeries) -> TruncatedSeries {
        s.inverse().expect("constant term 1")
    }

    fn one_minus(&self, s: &TruncatedSeries) -> TruncatedSeries {
        &self.one - s
    }
}

fn gf_ring(max_len: usize, letters: usize, per_letter: bool, cycle_vars: bool) -> Result<GfRing> {
    let mut b = SeriesRing::builder();
    let xs: Vec<String> = if per_letter {
        (1..=letters).map(|k| format!("x{k}")).collect()
    } else {
        vec!["x".to_string()]
    };
    b = b.vars(xs.iter().cloned());
    let x_weights: Vec<(&str, u32)> = xs.iter().map(|s| (s.as_str(), 1)).collect();
    b = b.bound(&x_weights, max_len as u32);
    let us: Vec<String> = if cycle_vars {
        (1..=max_len).map(|i| format!("u{i}")).collect()
    } else {
        vec!["u".to_string()]
    };
    b = b.vars(us.iter().cloned());
    if cycle_vars {
        let w: Vec<(&str, u32)> = us.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32 + 1)).collect();
        b = b.bound(&w, max_len as u32);
    } else {
        b = b.cap("u", max_len as u32);
    }
    let ring = b.build()?;
    let one = TruncatedSeries::one(&ring);
    Ok(GfRing { ring, one })
}

/// Builds both sides of one identity, enumerating all words of length ≤ `max_len`
/// over `letters` letters.
pub fn genfunc_sides(which: GenfuncIdentity, max_len: usize, letters: usize) -> Result<GenfuncSides> {
    if max_len == 0 || letters == 0 {
        return Err(Error::Truncation("need at least one letter and length 1".into()));
    }
    let per_letter = matches!(
        which,
        GenfuncIdentity::MultisetC | GenfuncIdentity::MultisetCPrime | GenfuncIdentity::Words1 | GenfuncIdentity::Words3
    );
    let cycle_vars = !matches!(which, GenfuncIdentity::MultisetC | GenfuncIdentity::MultisetCPrime);
    let g = gf_ring(max_len, letters, per_letter, cycle_vars)?;
    let ring = &g.ring;
    let nr = rat_int(letters as i64);
    let scale_words = cycle_vars;

    // left side
    let mut lhs = g.one.clone();
    for n in 1..=max_len {
        let weight = if scale_words {
            BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(letters), n))
        } else {
            BigRational::one()
        };
        for w in all_words(n, letters as u32) {
            let stats = foata_decompose(&w).stats();
            let mut powers: Vec<(String, u32)> = Vec::new();
            if per_letter {
                for (k, &m) in w.mults().iter().enumerate() {
                    if m > 0 {
                        powers.push((format!("x{}", k + 1), m as u32));
                    }
                }
            } else {
                powers.push(("x".into(), n as u32));
            }
            match which {
                GenfuncIdentity::MultisetC => powers.push(("u".into(), stats.c as u32)),
                GenfuncIdentity::MultisetCPrime => powers.push(("u".into(), stats.c_prime as u32)),
                GenfuncIdentity::Words1 | GenfuncIdentity::Words2 => {
                    for (i, m) in &stats.by_length {
                        powers.push((format!("u{i}"), *m as u32));
                    }
                }
                GenfuncIdentity::Words3 | GenfuncIdentity::Words4 => {
                    for (i, m) in &stats.by_length_prime {
                        powers.push((format!("u{i}"), *m as u32));
                    }
                }
            }
            let refs: Vec<(&str, u32)> = powers.iter().map(|(s, e)| (s.as_str(), *e)).collect();
            lhs = &lhs + &TruncatedSeries::term(ring, &refs, weight.clone())?;
        }
    }
    let x = |k: usize| {
        if per_letter {
            g.var(&format!("x{k}"))
        } else {
            g.var("x")
        }
    };
    // letter weight x_k (scaled by 1/N for words) and S_k = Σ_{j>k} of the same
    let scaled = |k: usize| {
        let v = x(k);
        if scale_words {
            v.scale(&(BigRational::one() / &nr))
        } else {
            v
        }
    };
    let tail = |k: usize| {
        let mut s = TruncatedSeries::zero(ring);
        for j in k + 1..=letters {
            s = &s + &scaled(j);
        }
        s
    };
    let prefactor = matches!(which, GenfuncIdentity::Words2 | GenfuncIdentity::Words4);

    let (printed, corrected) = match which {
        GenfuncIdentity::MultisetC => {
            let u = g.var("u");
            let mut p = g.one.clone();
            for k in 1..=letters {
                let ck = &x(k) * &g.inv(&g.one_minus(&tail(k)));
                p = &p * &g.inv(&g.one_minus(&(&u * &ck)));
            }
            (p.clone(), p)
        }
        GenfuncIdentity::MultisetCPrime => {
            let u = g.var("u");
            let mut printed = g.one.clone();
            let mut corrected = g.one.clone();
            for k in 1..=letters {
                let ck = &x(k) * &g.inv(&g.one_minus(&tail(k)));
                // displayed inner sum Σ_{j>k} x_k, i.e. (N − k) x_k over a finite alphabet
                let inner = x(k).scale(&rat_int((letters - k) as i64));
                let printed_den = g.one_minus(&(&x(k) * &g.inv(&g.one_minus(&inner))));
                printed = &printed * &(&g.one + &(&(&u * &ck) * &g.inv(&printed_den)));
                corrected = &corrected * &(&g.one + &(&(&u * &ck) * &g.inv(&g.one_minus(&ck))));
            }
            (printed, corrected)
        }
        GenfuncIdentity::Words1 | GenfuncIdentity::Words2 => {
            let mut printed = g.one.clone();
            let mut corrected = g.one.clone();
            for k in 1..=letters {
                let mut all_lengths = TruncatedSeries::zero(ring);
                for i in 1..=max_len {
                    let ui = g.var(&format!("u{i}"));
                    let cyc = &scaled(k) * &tail(k).pow(i as u32 - 1);
                    let c = &ui * &cyc;
                    printed = &printed * &g.inv(&g.one_minus(&c));
                    if prefactor {
                        printed = &printed * &g.one_minus(&cyc);
                    }
                    all_lengths = &all_lengths + &c;
                }
                corrected = &corrected * &g.inv(&g.one_minus(&all_lengths));
            }
            if prefactor {
                corrected = &corrected * &g.one_minus(&g.var("x"));
            }
            (printed, corrected)
        }
        GenfuncIdentity::Words3 | GenfuncIdentity::Words4 => {
            let mut printed = g.one.clone();
            let mut corrected = g.one.clone();
            for k in 1..=letters {
                let base = &scaled(k) * &g.inv(&g.one_minus(&tail(k)));
                let cycles: Vec<TruncatedSeries> = (1..=max_len)
                    .map(|i| &scaled(k) * &tail(k).pow(i as u32 - 1))
                    .collect();
                for i in 1..=max_len {
                    let ui = g.var(&format!("u{i}"));
                    printed = &printed * &(&g.one + &(&ui * &base));
                    if prefactor {
                        printed = &printed * &g.inv(&(&g.one + &base));
                    }
                }
                corrected = &corrected * &distinct_length_sequences(&g, &cycles, max_len)?;
            }
            if prefactor {
                corrected = &corrected * &g.one_minus(&g.var("x"));
            }
            (printed, corrected)
        }
    };
    let lhs = if prefactor {
        &lhs * &g.one_minus(&g.var("x"))
    } else {
        lhs
    };
    Ok(GenfuncSides {
        lhs,
        printed,
        corrected,
    })
}

/// Σ over finite sequences of cycles (weights c_i for length i) of Π_{i used} u_i,
/// by inclusion–exclusion over the set of lengths that must appear.
fn distinct_length_sequences(g: &GfRing, c: &[TruncatedSeries], max_len: usize) -> Result<TruncatedSeries> {
    let total = c.iter().fold(TruncatedSeries::zero(&g.ring), |acc, x| &acc + x);
    let mut out = TruncatedSeries::zero(&g.ring);
    for t_mask in 0u32..(1 << max_len) {
        let mut marker = g.one.clone();
        for i in 0..max_len {
            if t_mask & (1 << i) != 0 {
                marker = &marker * &(&g.var(&format!("u{}", i + 1)) - &g.one);
            }
        }
        // sequences whose set of lengths contains T
        let mut contains = TruncatedSeries::zero(&g.ring);
        let mut s_mask = t_mask;
        loop {
            let mut removed = TruncatedSeries::zero(&g.ring);
            for (i, ci) in c.iter().enumerate() {
                if s_mask & (1 << i) != 0 {
                    removed = &removed + ci;
                }
            }
            let only = g.inv(&g.one_minus(&(&total - &removed)));
            if s_mask.count_ones() % 2 == 0 {
                contains = &contains + &only;
            } else {
                contains = &contains - &only;
            }
            if s_mask == 0 {
                break;
            }
            s_mask = (s_mask - 1) & t_mask;
        }
        out = &out + &(&marker * &contains);
    }
    Ok(out)
}

/// Compares the displayed and corrected forms of one identity against enumeration.
pub fn genfunc_check(which: GenfuncIdentity, max_len: usize, letters: usize) -> Result<Report> {
    let sides = genfunc_sides(which, max_len, letters)?;
    let mut report = Report::new(format!("{which}, length<={max_len}, N={letters}"));
    let printed = sides.lhs.max_abs_diff(&sides.printed);
    let corrected = sides.lhs.max_abs_diff(&sides.corrected);
    let mut displayed = CheckResult::new("displayed form", printed.is_zero(), format!("max discrepancy {printed}"));
    if matches!(
        which,
        GenfuncIdentity::MultisetCPrime
            | GenfuncIdentity::Words1
            | GenfuncIdentity::Words2
            | GenfuncIdentity::Words3
            | GenfuncIdentity::Words4
    ) {
        displayed = displayed.known_defect();
    }
    report.push(displayed);
    report.check("corrected form", corrected.is_zero(), format!("max discrepancy {corrected}"));
    Ok(report)
}

/// Coefficients of x-monomials with the same exponent sequence on different
/// increasing sets of letters agree, for every power of u.
pub fn quasisymmetry_check(max_len: usize, letters: usize) -> Result<Report> {
    let sides = genfunc_sides(GenfuncIdentity::MultisetC, max_len, letters)?;
    let ring = sides.lhs.ring().clone();
    let xi: Vec<usize> = (1..=letters).map(|k| ring.index(&format!("x{k}")).unwrap()).collect();
    let ui = ring.index("u")?;
    let mut groups: BTreeMap<(Vec<u32>, u32), BTreeSet<String>> = BTreeMap::new();
    let mut patterns: BTreeSet<(Vec<u32>, u32)> = BTreeSet::new();
    for (exps, _) in sides.lhs.terms() {
        let pat: Vec<u32> = xi.iter().map(|&i| exps[i]).filter(|&e| e > 0).collect();
        patterns.insert((pat, exps[ui]));
    }
    let mut mismatches = Vec::new();
    for (pat, ue) in &patterns {
        let mut values = BTreeSet::new();
        for subset in increasing_subsets(letters, pat.len()) {
            let mut exps = vec![0u32; ring.nvars()];
            for (slot, &k) in subset.iter().enumerate() {
                exps[xi[k]] = pat[slot];
            }
            exps[ui] = *ue;
            values.insert(sides.lhs.coeff(&exps).to_string());
        }
        if values.len() > 1 {
            mismatches.push(format!("{pat:?} u^{ue}"));
        }
        groups.insert((pat.clone(), *ue), values);
    }
    let mut report = Report::new(format!("quasisymmetry, length<={max_len}, N={letters}"));
    report.check(
        "equal coefficients across letter subsets",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} patterns", groups.len())
        } else {
            mismatches.join("; ")
        },
    );
    Ok(report)
}

fn increasing_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == size {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Compositions of every total ≤ `max_total` into ≤ `max_letters` positive parts.
pub fn multiplicity_vectors(max_total: usize, max_letters: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(rem: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if slots == 0 {
            return;
        }
        for p in 1..=rem {
            cur.push(p);
            rec(rem - p, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(max_total, max_letters, &mut Vec::new(), &mut out);
    out
}

/// Φ is a bijection of Mult(a⃗) and carries first piles of π^rev to cycle counts.
pub fn phi_report(max_total: usize, max_letters: usize) -> Report {
    let mut report = Report::new(format!("records to cycles, total<={max_total}, letters<={max_letters}"));
    let (mut vectors, mut words) = (0usize, 0usize);
    let mut failures = Vec::new();
    for a in multiplicity_vectors(max_total, max_letters) {
        vectors += 1;
        let all = multiset_words(&a);
        let mut images = BTreeSet::new();
        for w in &all {
            words += 1;
            let phi = phi_bijection(w);
            let image = phi.product().word();
            if image.mults() != w.mults() {
                failures.push(format!("{a:?}: multiset changed for {}", w.render(Alphabet::Integers)));
            }
            if foata_decompose(&image) != phi {
                failures.push(format!("{a:?}: factorization of Φ differs for {}", w.render(Alphabet::Integers)));
            }
            let stats = phi.stats();
            let rev = w.reversed();
            let weak = left_to_right_minima(rev.symbols(), TieRule::Allowed).len();
            let strict = left_to_right_minima(rev.symbols(), TieRule::Forbidden).len();
            if first_pile_of_reversal(w, TieRule::Allowed) != stats.c
                || first_pile_of_reversal(w, TieRule::Forbidden) != stats.c_prime
                || weak != stats.c
                || strict != stats.c_prime
            {
                failures.push(format!("{a:?}: pile/cycle mismatch for {}", w.render(Alphabet::Integers)));
            }
            images.insert(image);
        }
        if images.len() != all.len() {
            failures.push(format!("{a:?}: not injective"));
        }
    }
    report.check(
        "bijection and first-pile identities",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{vectors} multiplicity vectors, {words} words")
        } else {
            failures.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn w(s: &str) -> MultisetWord {
        s.parse().unwrap()
    }

    #[test]
    fn introduction_deal() {
        let word = w("7 5 1 3 6 2 4");
        assert_eq!(patience_play(&word, TieRule::Forbidden), vec![3, 2, 2]);
        assert_eq!(patience_piles(&word, TieRule::Forbidden)[0], vec![7, 5, 1]);
        assert_eq!(patience_play(&w("2 1 1"), TieRule::Allowed)[0], 3);
        assert_eq!(patience_play(&w("1 1 2"), TieRule::Forbidden)[0], 1);
    }

    #[test]
    fn product_display() {
        let alpha = TwoLine::new(w("a a b c d").symbols, w("c a d a b").symbols).unwrap();
        let beta = TwoLine::new(w("a b d d d").symbols, w("b d d a d").symbols).unwrap();
        let prod = foata_product(&alpha, &beta);
        assert_eq!(
            prod.render(Alphabet::Letters),
            "a a a b b c d d d d\nc a b d d a b d a d"
        );
        assert_eq!(foata_product(&alpha, &TwoLine::empty()), alpha);
    }

    #[test]
    fn cycle_statistics_example() {
        let ic = Intercalation {
            cycles: vec![
                Cycle::from_written(&[4, 3, 1]).unwrap(),
                Cycle::from_written(&[2, 3, 1]).unwrap(),
                Cycle::from_written(&[4]).unwrap(),
            ],
        };
        let s = ic.stats();
        assert_eq!((s.by_length[&3], s.by_length_prime[&3], s.c, s.c_prime), (2, 1, 3, 2));
        assert_eq!(foata_decompose(&ic.product().word()), ic);
        let same = foata_decompose(&w("3 3 3 3")).stats();
        assert_eq!((same.c, same.c_prime), (4, 1));
    }

    #[test]
    fn phi_display() {
        let word = w("d d b c d b b c a b a c d b d");
        let rev = word.reversed();
        assert_eq!(left_to_right_minima(rev.symbols(), TieRule::Allowed), vec![1, 2, 5, 7]);
        let phi = phi_bijection(&word);
        assert_eq!(
            phi.render(Alphabet::Letters),
            "(d d b c d b b c a) T (b a) T (c d b) T (d)"
        );
    }

    #[test]
    fn round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let len = rng.gen_range(1..9);
            let word = MultisetWord::new((0..len).map(|_| rng.gen_range(1..5)).collect());
            let ic = foata_decompose(&word);
            assert_eq!(ic.product().word(), word);
            assert_eq!(foata_decompose(&ic.product().word()), ic);
            let ys: Vec<u32> = ic.cycles.iter().map(|c| c.y).collect();
            assert!(ys.windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn first_pile_means() {
        assert_eq!(expected_first_pile(&[2, 1], TieRule::Allowed), rat(7, 3));
        assert_eq!(average_first_pile(&[2, 1], TieRule::Allowed), rat(7, 3));
        assert_eq!(expected_first_pile(&[2, 1], TieRule::Forbidden), rat(4, 3));
        assert_eq!(average_first_pile(&[2, 1], TieRule::Forbidden), rat(4, 3));
        let harmonic = rat(1, 1) + rat(1, 2) + rat(1, 3) + rat(1, 4);
        assert_eq!(expected_first_pile(&[1, 1, 1, 1], TieRule::Allowed), harmonic);
        assert_eq!(expected_first_pile(&[1, 1, 1, 1], TieRule::Forbidden), harmonic);
    }

    #[test]
    fn involutions() {
        for n in 0..=4 {
            assert_eq!(involution_firstpile_poly(n).unwrap(), involution_product_poly(n));
        }
        assert_eq!(render_poly(&involution_firstpile_poly(2).unwrap()), "1*x^4 + 2*x^2");
    }

    #[test]
    fn phi_small() {
        let r = phi_report(5, 3);
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn generating_functions_small() {
        for which in GenfuncIdentity::ALL {
            let r = genfunc_check(which, 4, 2).unwrap();
            assert!(r.ok(), "{r}");
        }
        assert!(quasisymmetry_check(4, 3).unwrap().ok());
    }
}
