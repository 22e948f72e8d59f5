//! Verification suites: exact invariant checks grouped by area.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::affine::{affine2_law, affine_measure, AffineMethod};
use crate::arith::{binomial, gcd, pow_big, rat_int};
use crate::conjecture::{
    class_compare, grand_identity_check, divisibility_scan, obvious_check, reciprocity_pair,
    maj_residue_report, transposition_report,
};
use crate::error::{Error, Result};
use crate::idempotents::{
    eulerian_idempotents, family_report, garsia_form_check, hanlon_check, signed_and_whitehouse,
    IdempotentFamily,
};
use crate::limits::Limits;
use crate::measure::{distance_to_uniform, PermMeasure};
use crate::patience::{
    average_first_pile, expected_first_pile, foata_product, genfunc_check, involution_firstpile_poly,
    involution_product_poly, multiplicity_vectors, patience_play, phi_bijection, phi_report,
    quasisymmetry_check, Alphabet, GenfuncIdentity, MultisetWord, TieRule, TwoLine,
};
use crate::perm::{cyclic_descent_row, descent_tables, enumerate_sn, eulerian_row, Permutation};
use crate::polyfactor::{
    class_measure, cyc_identity_check, expected_fixed_points, expected_fixed_points_of,
    poly_class_measure, FixedPointLaw, PolyConstraint, PolyMethod,
};
use crate::report::{CheckResult, Report};
use crate::shuffle::{
    cut_deletion_distances, cut_measure, random_schedule, riffle_measure,
    shuffle_then_cut_measure, tv_riffle_table,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Perm,
    Shuffle,
    Affine,
    Polyfactor,
    Idempotents,
    Conjectures,
    Patience,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Perm,
        Suite::Shuffle,
        Suite::Affine,
        Suite::Polyfactor,
        Suite::Idempotents,
        Suite::Conjectures,
        Suite::Patience,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Perm => "perm",
            Suite::Shuffle => "shuffle",
            Suite::Affine => "affine",
            Suite::Polyfactor => "polyfactor",
            Suite::Idempotents => "idempotents",
            Suite::Conjectures => "conjectures",
            Suite::Patience => "patience",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.to_string() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Runs a suite with decks up to `max_n` (individual checks cap lower where the
/// computation grows too fast).
pub fn run_suite(suite: Suite, max_n: usize, limits: &Limits) -> Result<Report> {
    if max_n < 2 {
        return Err(Error::InvalidArgument("max-n must be at least 2".into()));
    }
    limits.check_enumeration(max_n)?;
    match suite {
        Suite::Perm => perm_suite(max_n, limits),
        Suite::Shuffle => shuffle_suite(max_n, limits),
        Suite::Affine => affine_suite(max_n, limits),
        Suite::Polyfactor => polyfactor_suite(max_n, limits),
        Suite::Idempotents => idempotents_suite(max_n, limits),
        Suite::Conjectures => conjectures_suite(max_n, limits),
        Suite::Patience => patience_suite(max_n),
        Suite::All => {
            let mut all = Report::new(format!("all suites, max n {max_n}"));
            for s in Suite::EACH {
                all.extend(run_suite(s, max_n, limits)?);
            }
            Ok(all)
        }
    }
}

fn perm_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("perm");
    for n in 1..=max_n {
        let tables = descent_tables(n, limits)?;
        let row = eulerian_row(n);
        let brute_ok = (1..=n).all(|i| BigInt::from(*tables.eulerian.get(&i).unwrap_or(&0)) == row[i]);
        r.check(format!("Eulerian recurrence, n={n}"), brute_ok, "");
        let worpitzky = (1..=10i64).all(|x| {
            let rhs: BigInt = (1..=n).map(|i| &row[i] * binomial(x + i as i64 - 1, n as i64)).sum();
            rhs == pow_big(x, n)
        });
        r.check(format!("Worpitzky, n={n}"), worpitzky, "x = 1..10");
        if n >= 2 {
            let cyc = cyclic_descent_row(n);
            let brute = (0..=n).all(|i| BigInt::from(*tables.cyclic.get(&i).unwrap_or(&0)) == cyc[i]);
            r.check(format!("cyclic descent numbers, n={n}"), brute, "");
            let prev = eulerian_row(n - 1);
            let scaled = (1..n).all(|i| cyc[i] == &prev[i] * n);
            r.check(format!("B(n,i) = n A(n-1,i), n={n}"), scaled, "");
            let part1 = (1..=10i64).all(|x| {
                let rhs: BigInt = (1..n)
                    .map(|i| &prev[i] * binomial(n as i64 + x - i as i64 - 1, n as i64 - 1))
                    .sum();
                rhs == pow_big(x, n - 1)
            });
            r.check(format!("cyclic Worpitzky, n={n}"), part1, "x = 1..10");
        }
        let mut rotation_ok = true;
        let mut algebra_ok = true;
        for w in enumerate_sn(n, limits)? {
            for k in 0..n {
                let z = Permutation::rotation(n, k);
                let cd = w.cyclic_descent_count();
                rotation_ok &= z.compose(&w).cyclic_descent_count() == cd
                    && w.compose(&z).cyclic_descent_count() == cd;
            }
            algebra_ok &= w.compose(&w.inverse()).is_identity()
                && Permutation::unrank(n, w.rank()) == w
                && w.sign() == w.cycle_type().sign();
        }
        r.check(format!("cd invariant under rotations, n={n}"), rotation_ok, "");
        r.check(format!("inverse, rank and sign consistency, n={n}"), algebra_ok, "");
    }
    Ok(r)
}

fn shuffle_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("shuffle");
    let small = max_n.min(5);
    for n in 1..=max_n {
        for k in 1..=4 {
            let s = riffle_measure(n, k, limits)?;
            r.check(format!("riffle is a probability, n={n}, k={k}"), s.is_probability(), "");
            if n <= small {
                for k2 in 1..=3 {
                    let lhs = s.convolve(&riffle_measure(n, k2, limits)?)?;
                    r.check(
                        format!("riffle {k} * riffle {k2} = riffle {}, n={n}", k * k2),
                        lhs == riffle_measure(n, k * k2, limits)?,
                        "",
                    );
                }
            }
            let c = cut_measure(n)?;
            let cs = c.convolve(&s)?;
            r.check(
                format!("riffle-then-cut closed form, n={n}, k={k}"),
                cs == shuffle_then_cut_measure(n, k, limits)?,
                "",
            );
            r.check(format!("csc = cs, n={n}, k={k}"), cs.convolve(&c)? == cs, "");
            let rotated = PermMeasure::point_mass(&Permutation::rotation(n, 1 % n)).convolve(&cs)?;
            r.check(format!("cut absorbs rotations, n={n}, k={k}"), rotated == cs, "");
            let before = distance_to_uniform(&cs)?;
            let after = distance_to_uniform(&s.convolve(&c)?)?;
            r.check(
                format!("TV(C*S) <= TV(S*C), n={n}, k={k}"),
                before <= after,
                format!("{before} vs {after}"),
            );
            if n >= 2 {
                let lower = distance_to_uniform(&riffle_measure(n - 1, k, limits)?)?;
                r.check(
                    format!("TV(C*S) on S_n = TV(S) on S_(n-1), n={n}, k={k}"),
                    before == lower,
                    format!("{before}"),
                );
            }
        }
    }
    for n in 2..=small {
        let table = tv_riffle_table(n, 2, 3, false)?;
        let cut_table = tv_riffle_table(n, 2, 3, true)?;
        let lower = tv_riffle_table(n - 1, 2, 3, false)?;
        let mut enum_ok = true;
        for (m, v) in table.iter().enumerate() {
            let law = riffle_measure(n, 1 << (m + 1), limits)?;
            enum_ok &= distance_to_uniform(&law)? == *v;
        }
        r.check(format!("TV table matches enumeration, n={n}"), enum_ok, "k=2, m<=3");
        r.check(format!("with-cut table equals S_(n-1) table, n={n}"), cut_table == lower, "");
    }
    let n = small.max(2);
    let mut part3 = true;
    for seed in 0..20u64 {
        let steps = random_schedule(4, &[2, 3], seed);
        let (full, reduced) = cut_deletion_distances(n, &steps, limits)?;
        part3 &= full >= reduced;
    }
    r.check(format!("deleting cuts, 20 schedules, n={n}"), part3, "seeds 0..20");
    Ok(r)
}

fn affine_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("affine");
    for n in 2..=max_n {
        for k in 1..=4 {
            let base = affine_measure(n, k, AffineMethod::Partitions, limits)?;
            let mut agree = base.is_probability();
            for method in AffineMethod::ALL {
                agree &= affine_measure(n, k, method, limits)? == base;
            }
            r.check(format!("four definitions agree and sum to 1, n={n}, k={k}"), agree, "");
        }
        if n <= 6 {
            r.check(
                format!("physical 2-shuffle law, n={n}"),
                affine2_law(n, limits)? == affine_measure(n, 2, AffineMethod::Partitions, limits)?,
                "",
            );
        }
    }
    Ok(r)
}

fn polyfactor_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("polyfactor");
    let poly_n = max_n.min(5);
    for q in [2u64, 3] {
        for n in 1..=poly_n {
            let count = poly_class_measure(n, q, PolyConstraint::NonzeroConstant, PolyMethod::Count)?;
            let brute = poly_class_measure(n, q, PolyConstraint::NonzeroConstant, PolyMethod::Brute)?;
            let cs = class_measure(&shuffle_then_cut_measure(n, q as usize, limits)?)?;
            r.check(format!("riffle-then-cut types = factorization types, n={n}, q={q}"), cs == count, "");
            r.check(format!("counting = factoring, n={n}, q={q}"), count == brute, "");
            let all = poly_class_measure(n, q, PolyConstraint::All, PolyMethod::Count)?;
            let s = class_measure(&riffle_measure(n, q as usize, limits)?)?;
            r.check(format!("riffle types = unconstrained factorization types, n={n}, q={q}"), s == all, "");
        }
    }
    for n in 1..=max_n {
        for k in 2..=5 {
            let cs = expected_fixed_points_of(&shuffle_then_cut_measure(n, k, limits)?);
            let s = expected_fixed_points_of(&riffle_measure(n, k, limits)?);
            r.check(
                format!("expected fixed points, n={n}, k={k}"),
                cs == expected_fixed_points(n, k, FixedPointLaw::RiffleCut)
                    && s == expected_fixed_points(n, k, FixedPointLaw::Riffle),
                format!("{cs}, {s}"),
            );
        }
    }
    for k in [2u64, 3] {
        r.extend(cyc_identity_check(k, max_n.min(4), limits)?);
    }
    Ok(r)
}

fn idempotents_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("idempotents");
    let top = max_n.min(5);
    for n in 1..=top {
        r.extend(family_report("Eulerian idempotents", &eulerian_idempotents(n, limits)?, true)?);
        if n < top {
            let wh = signed_and_whitehouse(n, limits)?;
            r.extend(family_report("Whitehouse idempotents", &wh.whitehouse, false)?);
        }
        if n >= 2 {
            r.extend(garsia_form_check(n, &[1, 2, 3], limits)?);
        }
    }
    r.extend(hanlon_check(top.min(4), &[2, 3], limits)?);
    let fam: IdempotentFamily = eulerian_idempotents(top.min(4), limits)?;
    let identity_sum = fam.weighted_sum(1) == PermMeasure::identity(fam.n);
    r.check("weighted sum at k=1 is the identity", identity_sum, "");
    Ok(r)
}

fn conjectures_suite(max_n: usize, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("conjectures");
    for n in 1..=max_n.min(8) {
        r.extend(maj_residue_report(n, limits)?);
    }
    for n in 2..=max_n.min(6) {
        for q in [2usize, 3, 4, 5, 7, 8] {
            if gcd(n as i64, q as i64 - 1) == 1 {
                let cmp = class_compare(n, q, limits)?;
                r.check(
                    format!("affine and riffle-then-cut lump alike, n={n}, q={q}"),
                    cmp.max_discrepancy.is_zero(),
                    format!("max discrepancy {}", cmp.max_discrepancy),
                );
            }
        }
    }
    for (n, q) in [(2, 2), (3, 3), (3, 9), (5, 5)] {
        if n <= max_n {
            r.check(format!("affine = riffle-then-cut, n={n}, q={q}"), obvious_check(n, q, limits)?, "");
        }
    }
    r.extend(divisibility_scan(max_n, 9));
    r.extend(transposition_report(&[4, 5, 7, 8, 9]));
    let mut symmetric = true;
    for m in -3..=12i64 {
        for x in 1..=8 {
            for y in 1..=8 {
                let (a, b) = reciprocity_pair(m, x, y);
                symmetric &= a == b;
            }
        }
    }
    r.check("reciprocity symmetry", symmetric, "1 <= x, y <= 8, -3 <= m <= 12");
    r.extend(grand_identity_check(max_n.min(3), 3, 12, limits)?);
    Ok(r)
}

/// The worked deal, product and Φ displays, rendered exactly.
pub fn worked_examples() -> Vec<CheckResult> {
    let deal = MultisetWord::parse("7 5 1 3 6 2 4").expect("valid word").0;
    let piles = patience_play(&deal, TieRule::Forbidden);
    let piles = piles.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let letters = |s: &str| MultisetWord::parse(s).expect("valid word").0.symbols().to_vec();
    let alpha = TwoLine::new(letters("a a b c d"), letters("c a d a b")).expect("valid two-line");
    let beta = TwoLine::new(letters("a b d d d"), letters("b d d a d")).expect("valid two-line");
    let product = foata_product(&alpha, &beta).render(Alphabet::Letters);
    let phi = phi_bijection(&MultisetWord::new(letters("d d b c d b b c a b a c d b d")))
        .render(Alphabet::Letters);
    let expect_product = "a a a b b c d d d d\nc a b d d a b d a d";
    let expect_phi = "(d d b c d b b c a) T (b a) T (c d b) T (d)";
    vec![
        CheckResult::new("deal of 7 5 1 3 6 2 4", piles == "3 2 2", piles.clone()),
        CheckResult::new("intercalation product display", product == expect_product, product.replace('\n', " / ")),
        CheckResult::new("records-to-cycles display", phi == expect_phi, phi.clone()),
    ]
}

fn patience_suite(max_n: usize) -> Result<Report> {
    let mut r = Report::new("patience");
    for c in worked_examples() {
        r.push(c);
    }
    r.extend(phi_report((max_n + 2).min(7), 4));
    let mut means_ok = true;
    let total = (max_n + 3).min(8);
    for a in multiplicity_vectors(total, 4) {
        for tie in [TieRule::Allowed, TieRule::Forbidden] {
            means_ok &= average_first_pile(&a, tie) == expected_first_pile(&a, tie);
        }
    }
    r.check("mean first pile closed forms", means_ok, format!("total <= {total}, letters <= 4"));
    let len = max_n.min(5);
    for which in GenfuncIdentity::ALL {
        for letters in 1..=3 {
            r.extend(genfunc_check(which, len, letters)?);
        }
    }
    r.extend(quasisymmetry_check(5, 4)?);
    for n in 1..=max_n.min(6) {
        let got = involution_firstpile_poly(n)?;
        r.check(format!("fixed-point-free involutions, 2n={}", 2 * n), got == involution_product_poly(n), "");
    }
    let harmonic: BigRational = (1..=max_n as i64).map(|i| BigRational::one() / rat_int(i)).sum();
    let ones = vec![1; max_n];
    r.check(
        "distinct letters give the harmonic number",
        expected_first_pile(&ones, TieRule::Allowed) == harmonic
            && expected_first_pile(&ones, TieRule::Forbidden) == harmonic,
        format!("{harmonic}"),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn worked_examples_render() {
        assert!(worked_examples().iter().all(|c| c.passed));
    }

    #[test]
    fn small_suites_pass() {
        let limits = Limits::default();
        for s in [Suite::Perm, Suite::Shuffle, Suite::Affine, Suite::Patience] {
            let r = run_suite(s, 3, &limits).unwrap();
            assert!(r.ok(), "{r}");
        }
    }
}
