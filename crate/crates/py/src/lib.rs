//! Python bindings. Reports come back as plain dicts and lists.

use jalg_core::agenda::{image, is_strictly_contingent, pseudo_richness, Agenda};
use jalg_core::aggregation::{
    check_rational_universal, is_rational_attitude, lemma1_witness, lemma2_witness, verify_bijection, Aggregator,
    AttitudeFunction, DecisionCriterion, Profile, Setting, DEFAULT_PROFILE_BUDGET,
};
use jalg_core::algebra::{
    boolean2, distributive_lattice, enumerate_homomorphisms, is_homomorphism, mv_chain, FiniteAlgebra, Poset,
    Valuation, DEFAULT_HOM_BUDGET,
};
use jalg_core::impossibility::dictator_report;
use jalg_core::modal::{bao_from_frame, dietrich_summary, is_consistent, KripkeFrame};
use jalg_core::semantics::{check_selfextensionality, entails, interderivable, Matrix};
use jalg_core::syntax::{parse_formula, Formula, Signature};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn report<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(err)?)
}

fn parse(text: &str, sig: &Signature) -> PyResult<Formula> {
    parse_formula(text, sig).map_err(|e| err(format!("`{text}`: {e}")))
}

/// A finite algebra of truth values.
#[pyclass(name = "Algebra", module = "jalg", frozen)]
pub struct PyAlgebra {
    inner: FiniteAlgebra,
}

#[pymethods]
impl PyAlgebra {
    #[staticmethod]
    fn boolean() -> Self {
        Self { inner: boolean2() }
    }

    #[staticmethod]
    fn lukasiewicz(k: usize) -> PyResult<Self> {
        Ok(Self {
            inner: mv_chain(k).map_err(err)?,
        })
    }

    /// Down-set lattice of an antichain (`chain=False`) or chain of `n` points.
    #[staticmethod]
    #[pyo3(signature = (n, chain = false))]
    fn lattice(n: usize, chain: bool) -> PyResult<Self> {
        let poset = if chain { Poset::chain(n) } else { Poset::antichain(n) };
        Ok(Self {
            inner: distributive_lattice(&poset).map_err(err)?,
        })
    }

    /// Complex algebra of a reflexive frame given as `(worlds, [(a, b), ...])`.
    #[staticmethod]
    fn from_frame(worlds: usize, relation: Vec<(usize, usize)>) -> PyResult<Self> {
        let frame = KripkeFrame::reflexive(worlds, relation).map_err(err)?;
        Ok(Self {
            inner: bao_from_frame(&frame).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: FiniteAlgebra::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_value().to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn connectives(&self) -> Vec<(String, usize)> {
        self.inner
            .signature()
            .connectives()
            .iter()
            .map(|c| (c.name.clone(), c.arity))
            .collect()
    }

    fn apply(&self, op: &str, args: Vec<usize>) -> PyResult<usize> {
        self.inner.apply_named(op, &args).map_err(err)
    }

    /// Value of a formula under a valuation `{"x1": element, ...}`.
    fn evaluate(&self, formula: &str, valuation: std::collections::BTreeMap<String, usize>) -> PyResult<usize> {
        let f = parse(formula, self.inner.signature())?;
        let v: Valuation = valuation.into_iter().collect();
        self.inner.evaluate(&f, &v).map_err(err)
    }

    fn power(&self, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.power(n).map_err(err)?,
        })
    }

    fn is_homomorphism(&self, map: Vec<usize>, target: &PyAlgebra) -> PyResult<bool> {
        Ok(is_homomorphism(&map, &self.inner, &target.inner).map_err(err)?.holds())
    }

    /// Tables of every homomorphism `self^n → self`.
    #[pyo3(signature = (n, budget = DEFAULT_HOM_BUDGET))]
    fn homomorphisms(&self, n: usize, budget: u64) -> PyResult<Vec<Vec<usize>>> {
        let power = self.inner.power(n).map_err(err)?;
        Ok(enumerate_homomorphisms(&power, &self.inner, budget)
            .map_err(err)?
            .into_iter()
            .map(|h| h.into_map())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Algebra(size={}, class={:?})", self.inner.size(), self.inner.class())
    }
}

/// A logic presented by a matrix: filter mode or degree mode.
#[pyclass(name = "Logic", module = "jalg", frozen)]
pub struct PyLogic {
    inner: Matrix,
}

#[pymethods]
impl PyLogic {
    #[staticmethod]
    fn classical() -> Self {
        Self {
            inner: Matrix::classical(),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (k, degree = false))]
    fn lukasiewicz(k: usize, degree: bool) -> PyResult<Self> {
        let m = if degree {
            Matrix::lukasiewicz_degree(k)
        } else {
            Matrix::lukasiewicz(k)
        };
        Ok(Self { inner: m.map_err(err)? })
    }

    /// Filter mode with the given designated elements, or degree mode when
    /// `designated` is omitted.
    #[staticmethod]
    #[pyo3(signature = (algebra, designated = None))]
    fn from_algebra(algebra: &PyAlgebra, designated: Option<Vec<usize>>) -> PyResult<Self> {
        let a = algebra.inner.clone();
        let m = match designated {
            Some(d) => Matrix::filter(a, d.into_iter().collect()),
            None => Matrix::degree(a),
        };
        Ok(Self { inner: m.map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Matrix::from_json(text).map_err(err)?,
        })
    }

    #[getter]
    fn algebra(&self) -> PyAlgebra {
        PyAlgebra {
            inner: self.inner.algebra().clone(),
        }
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode_name()
    }

    fn entails(&self, premises: Vec<String>, conclusion: &str) -> PyResult<bool> {
        let sig = self.inner.algebra().signature();
        let ps = premises.iter().map(|p| parse(p, sig)).collect::<PyResult<Vec<_>>>()?;
        entails(&self.inner, &ps, &parse(conclusion, sig)?).map_err(err)
    }

    fn interderivable(&self, phi: &str, psi: &str) -> PyResult<bool> {
        let sig = self.inner.algebra().signature();
        interderivable(&self.inner, &parse(phi, sig)?, &parse(psi, sig)?).map_err(err)
    }

    #[pyo3(signature = (variables = 2, depth = 2))]
    fn check_selfext(&self, py: Python<'_>, variables: usize, depth: usize) -> PyResult<Py<PyAny>> {
        let vars: Vec<String> = (1..=variables).map(|i| format!("x{i}")).collect();
        report(py, &check_selfextensionality(&self.inner, &vars, depth).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Logic(size={}, mode={})", self.inner.algebra().size(), self.inner.mode_name())
    }
}

/// A finite set of formulas over a logic.
#[pyclass(name = "Agenda", module = "jalg", frozen)]
pub struct PyAgenda {
    inner: Agenda,
}

#[pymethods]
impl PyAgenda {
    #[new]
    fn new(logic: &PyLogic, formulas: Vec<String>) -> PyResult<Self> {
        let texts: Vec<&str> = formulas.iter().map(String::as_str).collect();
        Ok(Self {
            inner: Agenda::parse(logic.inner.clone(), &texts).map_err(err)?,
        })
    }

    /// Formulas in canonical order; attitudes are lists aligned with it.
    #[getter]
    fn formulas(&self) -> Vec<String> {
        self.inner.formulas().iter().map(ToString::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn pseudo_richness(&self) -> PyResult<usize> {
        Ok(pseudo_richness(&self.inner).map_err(err)?.level())
    }

    fn strictly_contingent(&self) -> PyResult<Vec<String>> {
        let b = self.inner.algebra();
        let mut out = Vec::new();
        for f in self.inner.formulas() {
            if is_strictly_contingent(f, b).map_err(err)? {
                out.push(f.to_string());
            }
        }
        Ok(out)
    }

    fn image(&self, formula: &str) -> PyResult<Vec<usize>> {
        let f = parse(formula, self.inner.signature())?;
        Ok(image(&f, self.inner.algebra()).map_err(err)?.into_iter().collect())
    }

    /// The least valuation realizing an attitude, or `None`.
    fn is_rational(&self, values: Vec<usize>) -> PyResult<Option<std::collections::BTreeMap<String, usize>>> {
        Ok(is_rational_attitude(&self.inner, &AttitudeFunction(values))
            .map_err(err)?
            .map(|v| v.iter().map(|(k, &a)| (k.clone(), a)).collect()))
    }

    /// `(deltas, attitude)` with `attitude[deltas[j]] == targets[j]`.
    fn lemma1(&self, targets: Vec<usize>) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let w = lemma1_witness(&self.inner, &targets).map_err(err)?;
        Ok((w.deltas, w.attitude.0))
    }

    /// `(deltas, profile)` with `[a[deltas[j]] for a in profile] == targets[j]`.
    fn lemma2(&self, electorate: usize, targets: Vec<Vec<usize>>) -> PyResult<(Vec<usize>, Vec<Vec<usize>>)> {
        let w = lemma2_witness(&self.inner, electorate, &targets).map_err(err)?;
        Ok((w.deltas, w.profile.0.into_iter().map(|a| a.0).collect()))
    }

    fn __repr__(&self) -> String {
        format!("Agenda({:?})", self.formulas())
    }
}

fn setting(agenda: &PyAgenda, electorate: usize, budget: u64) -> PyResult<Setting> {
    Setting::with_budget(agenda.inner.clone(), electorate, budget).map_err(err)
}

/// Homomorphisms `B^N → B` against qualifying aggregators, with round trips.
#[pyfunction]
#[pyo3(signature = (agenda, electorate, depth = 2, budget = DEFAULT_HOM_BUDGET))]
fn verify(py: Python<'_>, agenda: &PyAgenda, electorate: usize, depth: usize, budget: u64) -> PyResult<Py<PyAny>> {
    let s = setting(agenda, electorate, budget)?;
    report(py, &verify_bijection(&s, depth, budget).map_err(err)?)
}

/// Applies the criterion-induced aggregator to a profile of attitude lists.
#[pyfunction]
fn aggregate(agenda: &PyAgenda, table: Vec<usize>, profile: Vec<Vec<usize>>) -> PyResult<Option<Vec<usize>>> {
    let k = agenda.inner.algebra().size();
    let f = DecisionCriterion::new(k, profile.len(), table).map_err(err)?;
    let s = setting(agenda, profile.len(), DEFAULT_PROFILE_BUDGET)?;
    let p = Profile(profile.into_iter().map(AttitudeFunction).collect());
    Ok(Aggregator::Criterion(f).apply(&s, &p).map(|a| a.0))
}

/// A rational profile whose criterion-induced output is irrational, if any.
#[pyfunction]
fn irrational_witness(agenda: &PyAgenda, table: Vec<usize>, electorate: usize) -> PyResult<Option<(Vec<Vec<usize>>, Vec<usize>)>> {
    let k = agenda.inner.algebra().size();
    let f = DecisionCriterion::new(k, electorate, table).map_err(err)?;
    let s = setting(agenda, electorate, DEFAULT_PROFILE_BUDGET)?;
    let r = check_rational_universal(&s, &Aggregator::Criterion(f));
    Ok(r
        .irrational
        .map(|(p, out)| (p.0.into_iter().map(|a| a.0).collect(), out.0)))
}

/// Homomorphism, ultrafilter and dictator status of `f: 2^N → 2`.
#[pyfunction]
fn classify_dictator(py: Python<'_>, table: Vec<usize>, electorate: usize) -> PyResult<Py<PyAny>> {
    let f = DecisionCriterion::new(2, electorate, table).map_err(err)?;
    report(py, &dictator_report(&f, &boolean2()).map_err(err)?)
}

/// Dietrich's conditions for the subjunctive and material readings.
#[pyfunction]
#[pyo3(signature = (max_worlds = 2, derivation_worlds = 3))]
fn check_dietrich(py: Python<'_>, max_worlds: usize, derivation_worlds: usize) -> PyResult<Py<PyAny>> {
    report(py, &dietrich_summary(max_worlds, derivation_worlds).map_err(err)?)
}

/// First pointed reflexive model of the formulas within `max_worlds` worlds.
#[pyfunction]
#[pyo3(signature = (formulas, max_worlds = 3))]
fn consistent(py: Python<'_>, formulas: Vec<String>, max_worlds: usize) -> PyResult<Py<PyAny>> {
    let sig = jalg_core::algebra::modal_signature();
    let gamma = formulas.iter().map(|f| parse(f, &sig)).collect::<PyResult<Vec<_>>>()?;
    report(py, &is_consistent(&gamma, max_worlds).map_err(err)?)
}

#[pymodule]
fn jalg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyLogic>()?;
    m.add_class::<PyAgenda>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(irrational_witness, m)?)?;
    m.add_function(wrap_pyfunction!(classify_dictator, m)?)?;
    m.add_function(wrap_pyfunction!(check_dietrich, m)?)?;
    m.add_function(wrap_pyfunction!(consistent, m)?)?;
    Ok(())
}
