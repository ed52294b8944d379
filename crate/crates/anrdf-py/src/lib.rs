//! Python bindings: parse, close and query annotated graphs, and work with
//! annotation literals.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use anrdf::anql::results::sort_rows;
use anrdf::compound::checks::compound_suite;
use anrdf::domain::axioms::axiom_suite;
use anrdf::graph::DEFAULT_MAX_FIRINGS;
use anrdf::syntax::{parse_document, serialize_dataset, PrefixMap};
use anrdf::{
    evaluate_dataset, parse_query, Annotation, Dataset, DefaultMode, DefaultRewrite, Domain,
    GraphError, Term, Triple,
};

fn domain(id: &str) -> PyResult<Domain> {
    Domain::from_id(id).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn literal(d: &Domain, text: &str) -> PyResult<Annotation> {
    d.parse_literal(text)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn graph_error(e: GraphError) -> PyErr {
    match e {
        GraphError::IterationCap(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Canonical form of an annotation literal.
#[pyfunction]
fn normalize(domain_id: &str, text: &str) -> PyResult<String> {
    let d = domain(domain_id)?;
    Ok(literal(&d, text)?.to_string())
}

/// `a ⊕ b`
#[pyfunction]
fn join(domain_id: &str, a: &str, b: &str) -> PyResult<String> {
    let d = domain(domain_id)?;
    let v = d
        .join(&literal(&d, a)?, &literal(&d, b)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(v.to_string())
}

/// `a ⊗ b`
#[pyfunction]
fn meet(domain_id: &str, a: &str, b: &str) -> PyResult<String> {
    let d = domain(domain_id)?;
    let v = d
        .meet(&literal(&d, a)?, &literal(&d, b)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(v.to_string())
}

/// `a ⪯ b`
#[pyfunction]
fn leq(domain_id: &str, a: &str, b: &str) -> PyResult<bool> {
    let d = domain(domain_id)?;
    d.leq(&literal(&d, a)?, &literal(&d, b)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs the axiom suite (and the compound suites) and returns
/// `{check name: passed}`.
#[pyfunction]
#[pyo3(signature = (domain_id, samples = 1000, seed = 42))]
fn check_domain(domain_id: &str, samples: usize, seed: u64) -> PyResult<BTreeMap<String, bool>> {
    let d = domain(domain_id)?;
    let mut out = BTreeMap::new();
    let mut reports = vec![axiom_suite(&d, samples, seed)];
    if let Domain::Compound(c) = &d {
        reports.push(compound_suite(c.as_ref(), seed));
    }
    for r in reports {
        for c in r.checks {
            out.insert(c.name.to_string(), c.passed());
        }
    }
    Ok(out)
}

/// An annotated graph loaded from `.anrdf` text.
#[pyclass(name = "Graph")]
struct PyGraph {
    data: Dataset,
    prefixes: PrefixMap,
}

fn term(prefixes: &PrefixMap, text: &str) -> Term {
    if let Some(iri) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Term::iri(iri);
    }
    match text.split_once(':') {
        Some((p, local)) if prefixes.get(p).is_some() => {
            Term::iri(&format!("{}{local}", prefixes.get(p).unwrap_or_default()))
        }
        _ => Term::iri(text),
    }
}

#[pymethods]
impl PyGraph {
    /// `default` is `top` or `segregate`; `domain_id` overrides the header.
    #[new]
    #[pyo3(signature = (text, domain_id = None, default = "top"))]
    fn new(text: &str, domain_id: Option<&str>, default: &str) -> PyResult<PyGraph> {
        let d = domain_id.map(domain).transpose()?;
        let mode = match default {
            "top" => DefaultMode::Top,
            "segregate" | "bottom" => DefaultMode::Segregate,
            other => return Err(PyValueError::new_err(format!("unknown default mode `{other}`"))),
        };
        let doc = parse_document(text, d.as_ref(), "py")
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let prefixes = doc.prefixes.clone();
        let data = doc.into_dataset(mode).map_err(graph_error)?;
        Ok(PyGraph { data, prefixes })
    }

    #[getter]
    fn domain(&self) -> String {
        self.data.graph.domain().id()
    }

    fn __len__(&self) -> usize {
        self.data.graph.len() + self.data.side.as_ref().map_or(0, |g| g.len())
    }

    #[pyo3(signature = (max_iterations = DEFAULT_MAX_FIRINGS))]
    fn closure(&self, max_iterations: usize) -> PyResult<PyGraph> {
        Ok(PyGraph {
            data: self.data.closure(max_iterations).map_err(graph_error)?,
            prefixes: self.prefixes.clone(),
        })
    }

    /// The annotation of a triple, or `None`. Terms are `<iri>` or prefixed names.
    fn annotation(&self, s: &str, p: &str, o: &str) -> PyResult<Option<String>> {
        let t = Triple::new(term(&self.prefixes, s), term(&self.prefixes, p), term(&self.prefixes, o))
            .map_err(graph_error)?;
        Ok(self.data.graph.get(&t).map(|a| a.to_string()))
    }

    fn serialize(&self) -> String {
        serialize_dataset(&self.data, &self.prefixes)
    }

    /// Evaluates a query; each row maps variable names to rendered values.
    #[pyo3(signature = (text, rewrite = "fresh-vars"))]
    fn query(&self, text: &str, rewrite: &str) -> PyResult<Vec<BTreeMap<String, String>>> {
        let rw = DefaultRewrite::from_name(rewrite)
            .ok_or_else(|| PyValueError::new_err(format!("unknown rewrite `{rewrite}`")))?;
        let q = parse_query(text, self.data.graph.domain(), rw)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let mut answers = evaluate_dataset(&self.data, &q);
        if !q.has_order() {
            sort_rows(&mut answers);
        }
        Ok(answers
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(v, _)| answers.variables.contains(v))
                    .map(|(v, x)| (v.name().to_string(), x.to_string()))
                    .collect()
            })
            .collect())
    }
}

#[pymodule]
fn anrdf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(join, m)?)?;
    m.add_function(wrap_pyfunction!(meet, m)?)?;
    m.add_function(wrap_pyfunction!(leq, m)?)?;
    m.add_function(wrap_pyfunction!(check_domain, m)?)?;
    m.add_class::<PyGraph>()?;
    Ok(())
}
