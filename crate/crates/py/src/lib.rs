//! Python module `riffle`. Rationals cross the boundary as `fractions.Fraction`.

use std::fmt::Display;

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use riffle_core::affine::{affine2_samples, affine_measure, AffineMethod};
use riffle_core::conjecture::reciprocity_pair;
use riffle_core::measure::{distance_to_uniform, total_variation, PermMeasure};
use riffle_core::patience::{
    foata_decompose, involution_firstpile_poly, patience_play as core_patience, phi_bijection,
    MultisetWord, TieRule,
};
use riffle_core::polyfactor::class_measure;
use riffle_core::shuffle::{cut_measure, gsr_samples, riffle_measure, shuffle_then_cut_measure, tv_riffle_table as core_tv};
use riffle_core::tsv::measure_to_tsv;
use riffle_core::verify::{run_suite, Suite};
use riffle_core::{Error, Limits};

fn to_py(e: Error) -> PyErr {
    if e.is_cap_violation() {
        PyOverflowError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn fraction<'py>(py: Python<'py>, r: impl Display) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// A permutation in 1-based one-line notation.
#[pyclass(name = "Permutation", module = "riffle", frozen, eq, hash)]
#[derive(PartialEq, Eq, Hash)]
struct PyPermutation(riffle_core::Permutation);

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(one_line: Vec<usize>) -> PyResult<Self> {
        riffle_core::Permutation::from_one_line(&one_line)
            .map(PyPermutation)
            .map_err(to_py)
    }

    #[staticmethod]
    fn rotation(n: usize, k: usize) -> Self {
        PyPermutation(riffle_core::Permutation::rotation(n, k))
    }

    fn one_line(&self) -> Vec<usize> {
        self.0.one_line()
    }

    fn compose(&self, other: &PyPermutation) -> PyResult<Self> {
        if self.0.n() != other.0.n() {
            return Err(PyValueError::new_err("permutations of different sizes"));
        }
        Ok(PyPermutation(self.0.compose(&other.0)))
    }

    fn inverse(&self) -> Self {
        PyPermutation(self.0.inverse())
    }

    fn descents(&self) -> usize {
        self.0.descent_count()
    }

    fn major_index(&self) -> usize {
        self.0.major_index()
    }

    fn cyclic_descents(&self) -> usize {
        self.0.cyclic_descent_count()
    }

    fn cycle_type(&self) -> String {
        self.0.cycle_type().to_string()
    }

    fn sign(&self) -> i32 {
        self.0.sign()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("Permutation([{}])", self.0.to_string().replace(' ', ", "))
    }
}

/// An exact signed measure (group algebra element) on S_n.
#[pyclass(name = "Measure", module = "riffle", frozen)]
struct PyMeasure(PermMeasure);

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn riffle(n: usize, k: usize) -> PyResult<Self> {
        riffle_measure(n, k, &Limits::default()).map(PyMeasure).map_err(to_py)
    }

    #[staticmethod]
    fn cut(n: usize) -> PyResult<Self> {
        cut_measure(n).map(PyMeasure).map_err(to_py)
    }

    #[staticmethod]
    fn riffle_cut(n: usize, k: usize) -> PyResult<Self> {
        shuffle_then_cut_measure(n, k, &Limits::default())
            .map(PyMeasure)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, k, method = "partitions"))]
    fn affine(n: usize, k: usize, method: &str) -> PyResult<Self> {
        let method: AffineMethod = parse(method)?;
        affine_measure(n, k, method, &Limits::default())
            .map(PyMeasure)
            .map_err(to_py)
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        PermMeasure::uniform(n, &Limits::default())
            .map(PyMeasure)
            .map_err(to_py)
    }

    #[staticmethod]
    fn point_mass(w: &PyPermutation) -> Self {
        PyMeasure(PermMeasure::point_mass(&w.0))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// Mass A(σ)B(τ) lands on σ∘τ: `b.convolve(a)` is "a, then b".
    fn convolve(&self, other: &PyMeasure) -> PyResult<Self> {
        self.0.convolve(&other.0).map(PyMeasure).map_err(to_py)
    }

    fn inverted(&self) -> Self {
        PyMeasure(self.0.invert())
    }

    fn coeff<'py>(&self, py: Python<'py>, w: &PyPermutation) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.coeff(&w.0))
    }

    fn entries<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Vec<usize>, Bound<'py, PyAny>)>> {
        self.0
            .entries()
            .into_iter()
            .map(|(w, c)| Ok((w.one_line(), fraction(py, c)?)))
            .collect()
    }

    fn total_mass<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.total_mass())
    }

    fn distance_to_uniform<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, distance_to_uniform(&self.0).map_err(to_py)?)
    }

    fn total_variation<'py>(&self, py: Python<'py>, other: &PyMeasure) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, total_variation(&self.0, &other.0).map_err(to_py)?)
    }

    /// Mass per cycle type, keys like "1^2 2^1".
    fn by_class<'py>(&self, py: Python<'py>) -> PyResult<Vec<(String, Bound<'py, PyAny>)>> {
        let c = class_measure(&self.0).map_err(to_py)?;
        c.entries()
            .map(|(ct, v)| Ok((ct.to_string(), fraction(py, v)?)))
            .collect()
    }

    fn to_tsv(&self) -> String {
        measure_to_tsv(&self.0)
    }

    fn __eq__(&self, other: &PyMeasure) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Measure(n={}, support={})", self.0.n(), self.0.support_len())
    }
}

#[pyfunction]
#[pyo3(signature = (n, k, max_shuffles, with_cut = false))]
fn tv_riffle_table<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    max_shuffles: usize,
    with_cut: bool,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    core_tv(n, k, max_shuffles, with_cut)
        .map_err(to_py)?
        .into_iter()
        .map(|v| fraction(py, v))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (word, ties = "forbidden"))]
fn patience_play(word: &str, ties: &str) -> PyResult<Vec<usize>> {
    let tie: TieRule = parse(ties)?;
    let (w, _) = MultisetWord::parse(word).map_err(to_py)?;
    Ok(core_patience(&w, tie))
}

/// (cycle factorization, records-to-cycles image), rendered in the word's alphabet.
#[pyfunction]
fn cycles(word: &str) -> PyResult<(String, String)> {
    let (w, alphabet) = MultisetWord::parse(word).map_err(to_py)?;
    Ok((foata_decompose(&w).render(alphabet), phi_bijection(&w).render(alphabet)))
}

/// Coefficients (by exponent) of Σ x^{first pile} over fixed-point-free involutions of S_{2n}.
#[pyfunction]
fn involution_first_piles(n: usize) -> PyResult<Vec<String>> {
    Ok(involution_firstpile_poly(n)
        .map_err(to_py)?
        .iter()
        .map(|c| c.to_string())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (law, n, count, seed, k = 2))]
fn sample(law: &str, n: usize, count: usize, seed: u64, k: usize) -> PyResult<Vec<Vec<usize>>> {
    let draws = match law {
        "gsr" => gsr_samples(n, k, count, seed),
        "affine2" => affine2_samples(n, count, seed),
        other => return Err(PyValueError::new_err(format!("unknown law '{other}'"))),
    }
    .map_err(to_py)?;
    Ok(draws.iter().map(|w| w.one_line()).collect())
}

#[pyfunction]
fn reciprocity(m: i64, x: usize, y: usize) -> (String, String) {
    let (a, b) = reciprocity_pair(m, x, y);
    (a.to_string(), b.to_string())
}

/// (all expected checks passed, text report).
#[pyfunction]
#[pyo3(signature = (suite = "all", max_n = 5))]
fn verify(suite: &str, max_n: usize) -> PyResult<(bool, String)> {
    let suite: Suite = parse(suite)?;
    let report = run_suite(suite, max_n, &Limits::default()).map_err(to_py)?;
    Ok((report.ok(), report.to_string()))
}

#[pymodule]
fn riffle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(tv_riffle_table, m)?)?;
    m.add_function(wrap_pyfunction!(patience_play, m)?)?;
    m.add_function(wrap_pyfunction!(cycles, m)?)?;
    m.add_function(wrap_pyfunction!(involution_first_piles, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocity, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
