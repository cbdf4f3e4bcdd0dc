//! Python bindings: terms, the normalizers, traces and convertibility.

use lamvm::convert::{self, Verdict};
use lamvm::kn::kn_run;
use lamvm::knv::{self, PrefixEvent};
use lamvm::nbe::{nbe_cbn, nbe_cbv};
use lamvm::oracle::{normalize_normal_order, normalize_rrcbv};
use lamvm::term::{classify, open_count};
use lamvm::{Error, Notation};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pylamvm, ParseError, PyValueError);
create_exception!(pylamvm, OpenTermError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(p) => ParseError::new_err(p.to_string()),
        Error::OpenTerm { .. } => OpenTermError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn notation(name: Option<&str>, text: &str) -> PyResult<Notation> {
    match name {
        Some(n) => n.parse().map_err(PyValueError::new_err),
        None if text.chars().any(|c| c.is_alphabetic() && c != 'λ') => Ok(Notation::Named),
        None => Ok(Notation::DeBruijn),
    }
}

/// A lambda term with de Bruijn indices.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "pylamvm")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Term(lamvm::Term);

#[pymethods]
impl Term {
    /// Parses `text`; the notation ("debruijn" or "named") is guessed when omitted.
    #[new]
    #[pyo3(signature = (text, notation=None))]
    fn new(text: &str, notation: Option<&str>) -> PyResult<Term> {
        let n = self::notation(notation, text)?;
        lamvm::parse(text, n)
            .map(Term)
            .map_err(|e| ParseError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn church(n: usize) -> Term {
        Term(lamvm::church(n))
    }

    fn named(&self) -> String {
        lamvm::print(&self.0, Notation::Named)
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn is_closed(&self) -> bool {
        open_count(&self.0) == 0
    }

    /// The syntactic classes of the term, among "normal", "neutral",
    /// "weak_normal" and "inert".
    fn classes(&self) -> Vec<&'static str> {
        let f = classify(&self.0);
        [
            (f.normal, "normal"),
            (f.neutral, "neutral"),
            (f.weak_normal, "weak_normal"),
            (f.inert, "inert"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", self.0.to_string())
    }
}

/// Result of a normalization: the normal form, or None when the budget ran out.
#[pyclass(frozen, get_all, module = "pylamvm")]
struct Outcome {
    normal_form: Option<Term>,
    /// Transitions, evaluation steps or contractions, depending on the engine.
    spent: u64,
    /// Contractions fired, for the machines.
    contractions: Option<u64>,
}

#[pymethods]
impl Outcome {
    fn __repr__(&self) -> String {
        match &self.normal_form {
            Some(t) => format!("Outcome(normal_form={}, spent={})", t.0, self.spent),
            None => format!("Outcome(fuel exhausted, spent={})", self.spent),
        }
    }
}

/// Normalizes `term` with one of "knv", "kn", "nbe-cbv", "nbe-cbn",
/// "oracle-rrcbv" or "oracle-no".
#[pyfunction]
#[pyo3(signature = (term, machine="knv", fuel=1_000_000))]
fn normalize(py: Python<'_>, term: &Term, machine: &str, fuel: u64) -> PyResult<Outcome> {
    let t = term.0.clone();
    let machine = machine.to_string();
    let result = py.detach(move || -> Result<_, Error> {
        Ok(match machine.as_str() {
            "knv" => {
                let r = knv::run(&t, fuel)?;
                let s = r.stats();
                (r.normal_form().cloned(), s.transitions(), Some(s.contractions()))
            }
            "kn" => {
                let r = kn_run(&t, fuel)?;
                let s = r.stats();
                (r.normal_form().cloned(), s.transitions(), Some(s.contractions()))
            }
            "nbe-cbv" => {
                let r = nbe_cbv(&t, fuel)?;
                (r.normal_form().cloned(), r.spent(), None)
            }
            "nbe-cbn" => {
                let r = nbe_cbn(&t, fuel)?;
                (r.normal_form().cloned(), r.spent(), None)
            }
            "oracle-rrcbv" => {
                let r = normalize_rrcbv(&t, fuel);
                (r.normal_form().cloned(), r.steps(), None)
            }
            "oracle-no" => {
                let r = normalize_normal_order(&t, fuel);
                (r.normal_form().cloned(), r.steps(), None)
            }
            other => return Err(Error::Stuck(format!("unknown machine `{other}`"))),
        })
    });
    let (nf, spent, contractions) = result.map_err(|e| match e {
        Error::Stuck(m) if m.starts_with("unknown machine") => PyValueError::new_err(m),
        e => to_py(e),
    })?;
    Ok(Outcome {
        normal_form: nf.map(Term),
        spent,
        contractions,
    })
}

/// The strong call-by-value machine's transitions as (rule, mode, level,
/// stack depth) tuples, starting with the loaded configuration as rule 0.
#[pyfunction]
#[pyo3(signature = (term, fuel=10_000))]
fn trace(term: &Term, fuel: u64) -> PyResult<Vec<(u8, &'static str, usize, usize)>> {
    let tr = knv::trace(&term.0, fuel).map_err(to_py)?;
    Ok(tr
        .steps
        .iter()
        .map(|s| {
            let k = &s.config;
            (s.rule.number(), k.mode().as_str(), k.level(), k.stack().len())
        })
        .collect())
}

fn event(e: &PrefixEvent) -> (&'static str, Option<Term>) {
    match e {
        PrefixEvent::LamRevealed => ("lam", None),
        PrefixEvent::ArgNfRevealed(t) => ("arg", Some(Term(t.clone()))),
        PrefixEvent::Done(t) => ("done", Some(Term(t.clone()))),
    }
}

/// Partial normal-form events: ("lam", None), ("arg", nf) and ("done", nf).
#[pyfunction]
#[pyo3(signature = (term, fuel=1_000_000))]
fn stream_prefix(term: &Term, fuel: u64) -> PyResult<Vec<(&'static str, Option<Term>)>> {
    let events = knv::stream_prefix(&term.0, fuel).map_err(to_py)?;
    Ok(events.iter().map(event).collect())
}

/// Returns ("convertible", None), ("not_convertible", (index, left partial,
/// right partial)) or ("unknown", spent).
#[pyfunction]
#[pyo3(signature = (left, right, fuel=1_000_000))]
fn convertible<'py>(
    py: Python<'py>,
    left: &Term,
    right: &Term,
    fuel: u64,
) -> PyResult<(&'static str, Bound<'py, PyAny>)> {
    let (l, r) = (left.0.clone(), right.0.clone());
    let verdict = py.detach(move || convert::convertible(&l, &r, fuel)).map_err(to_py)?;
    Ok(match verdict {
        Verdict::Convertible => ("convertible", py.None().into_bound(py)),
        Verdict::NotConvertible {
            diverging_index,
            left_partial,
            right_partial,
            ..
        } => (
            "not_convertible",
            (
                diverging_index,
                left_partial.print(Notation::Named),
                right_partial.print(Notation::Named),
            )
                .into_pyobject(py)?
                .into_any(),
        ),
        Verdict::Unknown { budget_spent } => {
            ("unknown", budget_spent.into_pyobject(py)?.into_any())
        }
    })
}

#[pymodule]
fn pylamvm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Term>()?;
    m.add_class::<Outcome>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(stream_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(convertible, m)?)?;
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add("OpenTermError", m.py().get_type::<OpenTermError>())?;
    Ok(())
}
