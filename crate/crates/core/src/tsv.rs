//! Tab-separated text forms of measures and tables.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::measure::{ClassMeasure, PermMeasure};
use crate::perm::{CycleType, Permutation};

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

fn split_row(line: &str) -> Result<(&str, &str)> {
    line.split_once('\t')
        .ok_or_else(|| Error::Parse(format!("expected a tab in {line:?}")))
}

fn rows(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim().is_empty())
}

/// One row per support element, lexicographic by one-line notation.
pub fn measure_to_tsv(m: &PermMeasure) -> String {
    let mut out = String::new();
    for (w, c) in m.entries() {
        writeln!(out, "{w}\t{c}").unwrap();
    }
    out
}

/// Rows must all live on the same S_n; an empty text is an error since n is unknown.
pub fn measure_from_tsv(text: &str) -> Result<PermMeasure> {
    let mut entries = Vec::new();
    for line in rows(text) {
        let (w, c) = split_row(line)?;
        entries.push((w.parse::<Permutation>()?, parse_rational(c)?));
    }
    let n = entries
        .first()
        .map(|(w, _)| w.n())
        .ok_or_else(|| Error::Parse("no rows".into()))?;
    let mut m = PermMeasure::zero(n);
    for (w, c) in entries {
        if w.n() != n {
            return Err(Error::SizeMismatch { left: n, right: w.n() });
        }
        m.add_to(&w, &c);
    }
    Ok(m)
}

pub fn class_measure_to_tsv(m: &ClassMeasure) -> String {
    let mut out = String::new();
    for (ct, c) in m.entries() {
        writeln!(out, "{ct}\t{c}").unwrap();
    }
    out
}

pub fn class_measure_from_tsv(text: &str) -> Result<ClassMeasure> {
    let mut entries = Vec::new();
    for line in rows(text) {
        let (ct, c) = split_row(line)?;
        entries.push((ct.parse::<CycleType>()?, parse_rational(c)?));
    }
    let n = entries
        .first()
        .map(|(ct, _)| ct.n())
        .ok_or_else(|| Error::Parse("no rows".into()))?;
    let mut m = ClassMeasure::zero(n);
    for (ct, c) in entries {
        if ct.n() != n {
            return Err(Error::SizeMismatch { left: n, right: ct.n() });
        }
        m.add_to(&ct, &c);
    }
    Ok(m)
}

/// Rows "m\tvalue" with m counted from 1.
pub fn table_to_tsv(values: &[BigRational]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{}\t{v}", i + 1).unwrap();
    }
    out
}

pub fn table_from_tsv(text: &str) -> Result<Vec<BigRational>> {
    rows(text)
        .enumerate()
        .map(|(i, line)| {
            let (m, v) = split_row(line)?;
            if m.trim().parse::<usize>().ok() != Some(i + 1) {
                return Err(Error::Parse(format!("expected row index {} in {line:?}", i + 1)));
            }
            parse_rational(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;
    use crate::polyfactor::class_measure;
    use crate::shuffle::{riffle_measure, shuffle_then_cut_measure};
    use proptest::prelude::*;

    #[test]
    fn riffle_cut_text() {
        let m = shuffle_then_cut_measure(2, 2, &Limits::default()).unwrap();
        assert_eq!(measure_to_tsv(&m), "1 2\t1/2\n2 1\t1/2\n");
        let c = class_measure(&m).unwrap();
        assert_eq!(class_measure_to_tsv(&c), "2^1\t1/2\n1^2\t1/2\n");
    }

    #[test]
    fn malformed_rows() {
        assert!(measure_from_tsv("1 2 1/2").is_err());
        assert!(measure_from_tsv("1 2\tx").is_err());
        assert!(measure_from_tsv("").is_err());
        assert!(measure_from_tsv("1 2\t1/2\n1 2 3\t1/2").is_err());
        assert!(table_from_tsv("2\t1/2").is_err());
    }

    proptest! {
        #[test]
        fn round_trips(n in 1usize..6, k in 1usize..5) {
            let m = riffle_measure(n, k, &Limits::default()).unwrap();
            prop_assert_eq!(measure_from_tsv(&measure_to_tsv(&m)).unwrap(), m.clone());
            let c = class_measure(&m).unwrap();
            let back = class_measure_from_tsv(&class_measure_to_tsv(&c)).unwrap();
            prop_assert!(back.max_abs_diff(&c) == BigRational::from_integer(0.into()));
            let t: Vec<BigRational> = (1..=k as i64).map(|i| BigRational::new(i.into(), (i + 1).into())).collect();
            prop_assert_eq!(table_from_tsv(&table_to_tsv(&t)).unwrap(), t);
        }
    }
}
