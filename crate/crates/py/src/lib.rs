//! Python bindings: systems, the solver and oracle, surfaces, the length
//! constant, the bin packing reduction and solution-guided transformation traces.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quadeq::hypreduce::compute_l as core_compute_l;
use quadeq::makanin::entire::entire_transform;
use quadeq::makanin::geneq::guided_geneq;
use quadeq::makanin::{solve_quadratic, SolveOptions, Verdict};
use quadeq::npreduce::{self, BinPackInstance, EquationForm, EquivalenceBound, ReductionParams};
use quadeq::oracle::{find_solution, SearchBound};
use quadeq::quadratic::{triangulate as core_triangulate, Assignment, EquationSystem};
use quadeq::standard::{standardize as core_standardize, SurfaceKind};
use quadeq::surfaces::{glue, QuadraticSet};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A system of equations over a free group.
#[pyclass(name = "EquationSystem", module = "quadeq_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: EquationSystem,
}

impl PySystem {
    fn named(&self, asg: &Assignment) -> BTreeMap<String, String> {
        self.inner.show_assignment(asg).into_iter().collect()
    }
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        EquationSystem::parse(text).map(|inner| PySystem { inner }).map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("EquationSystem({} equations, size {})", self.inner.equations.len(), self.inner.size())
    }

    fn is_quadratic(&self) -> bool {
        self.inner.is_quadratic()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn variables(&self) -> Vec<String> {
        let al = &self.inner.alphabet;
        al.variables().into_iter().map(|v| al.name(v).to_string()).collect()
    }

    /// Checks a `{variable: word}` assignment by substitution and reduction.
    fn is_solution(&self, assignment: HashMap<String, String>) -> PyResult<bool> {
        let al = &self.inner.alphabet;
        let mut asg = Assignment::new();
        for (name, word) in assignment {
            let id = al
                .lookup(&name)
                .filter(|&id| al.is_variable(id))
                .ok_or_else(|| value_error(format!("unknown variable '{name}'")))?;
            asg.insert(id, al.parse_word(&word).map_err(value_error)?);
        }
        Ok(self.inner.is_solution(&asg))
    }
}

#[pyclass(module = "quadeq_py", frozen, get_all)]
struct SolveOutcome {
    /// `"sat"`, `"unsat"` or `"inconclusive"`.
    verdict: String,
    witness: Option<BTreeMap<String, String>>,
    states: usize,
}

#[pyfunction]
#[pyo3(signature = (system, max_states = 400_000))]
fn solve(system: &PySystem, max_states: usize) -> PyResult<SolveOutcome> {
    let r = solve_quadratic(&system.inner, &SolveOptions { bound: None, max_states }).map_err(value_error)?;
    let verdict = match r.verdict {
        Verdict::Sat => "sat",
        Verdict::Unsat => "unsat",
        Verdict::Inconclusive => "inconclusive",
    };
    Ok(SolveOutcome {
        verdict: verdict.to_string(),
        witness: r.witness.as_ref().map(|w| system.named(w)),
        states: r.states,
    })
}

/// A solution with every variable of length at most `bound`, if one exists.
#[pyfunction]
fn oracle(system: &PySystem, bound: usize) -> Option<BTreeMap<String, String>> {
    find_solution(&system.inner, SearchBound::new(bound)).map(|w| system.named(&w))
}

#[pyfunction]
fn triangulate(system: &PySystem) -> PySystem {
    PySystem {
        inner: core_triangulate(&system.inner).system,
    }
}

/// `(kind, genus, standard system)` of a single quadratic equation.
#[pyfunction]
fn standardize(system: &PySystem) -> PyResult<(String, usize, PySystem)> {
    let (form, _) = core_standardize(&system.inner).map_err(value_error)?;
    let kind = match form.kind {
        SurfaceKind::Orientable => "orientable",
        SurfaceKind::NonOrientable => "non-orientable",
    };
    Ok((kind.to_string(), form.genus, PySystem { inner: form.system() }))
}

#[pyclass(module = "quadeq_py", frozen, get_all)]
struct Surface {
    connected: bool,
    orientable: bool,
    euler: i64,
    genus: i64,
    components: usize,
}

/// Glues a quadratic set given as one cyclic word per line.
#[pyfunction]
fn surface(text: &str) -> PyResult<Surface> {
    let q = QuadraticSet::parse(text).map_err(value_error)?;
    let g = glue(&q);
    Ok(Surface {
        connected: g.is_connected(),
        orientable: g.is_orientable(),
        euler: g.euler(),
        genus: g.genus,
        components: g.components.len(),
    })
}

#[pyclass(module = "quadeq_py", frozen, get_all)]
struct LConstant {
    exponent: BigUint,
    log2: Option<BigUint>,
    decimal_digits: Option<BigUint>,
}

#[pyfunction]
fn compute_l(q: u64, delta: u32, alphabet: u64) -> PyResult<LConstant> {
    let l = core_compute_l(q, delta, alphabet).map_err(value_error)?;
    Ok(LConstant {
        log2: l.log2_exact(),
        exponent: l.exponent,
        decimal_digits: l.digits,
    })
}

fn instance(items: Vec<u64>, bins: u64, cap: u64) -> PyResult<BinPackInstance> {
    BinPackInstance::new(items, bins, cap).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (items, bins, cap, free_form = false))]
fn binpack_equation(items: Vec<u64>, bins: u64, cap: u64, free_form: bool) -> PyResult<PySystem> {
    let form = if free_form { EquationForm::Free } else { EquationForm::Full };
    let eq = npreduce::build_equation(&instance(items, bins, cap)?, &ReductionParams::default(), form).map_err(value_error)?;
    Ok(PySystem { inner: eq.system })
}

/// `(packing found, equation verdict, agree)` for one instance.
#[pyfunction]
#[pyo3(signature = (items, bins, cap, bound = 4))]
fn check_equivalence(items: Vec<u64>, bins: u64, cap: u64, bound: usize) -> PyResult<(bool, String, bool)> {
    let b = EquivalenceBound {
        oracle: bound,
        ..Default::default()
    };
    let r = npreduce::check_equivalence(&instance(items, bins, cap)?, &ReductionParams::default(), b).map_err(value_error)?;
    Ok((r.packing.is_some(), format!("{:?}", r.verdict), r.agrees()))
}

/// The entire-transformation trace guided by the solver's witness, or
/// `None` when the system has no solution.
#[pyfunction]
#[pyo3(signature = (system, budget = 10_000))]
fn geneq_trace(system: &PySystem, budget: usize) -> PyResult<Option<String>> {
    let r = solve_quadratic(&system.inner, &SolveOptions::default()).map_err(value_error)?;
    let Some(w) = r.witness else { return Ok(None) };
    let lead = guided_geneq(&system.inner, &w).map_err(value_error)?;
    let run = entire_transform(&lead.geneq, &lead.solution, budget).map_err(value_error)?;
    Ok(Some(run.trace()))
}

#[pymodule]
fn quadeq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<SolveOutcome>()?;
    m.add_class::<Surface>()?;
    m.add_class::<LConstant>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(triangulate, m)?)?;
    m.add_function(wrap_pyfunction!(standardize, m)?)?;
    m.add_function(wrap_pyfunction!(surface, m)?)?;
    m.add_function(wrap_pyfunction!(compute_l, m)?)?;
    m.add_function(wrap_pyfunction!(binpack_equation, m)?)?;
    m.add_function(wrap_pyfunction!(check_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(geneq_trace, m)?)?;
    Ok(())
}
