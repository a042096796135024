//! Python module `cqa`: repairs and consistent query answers.

use cqa_core::compiler::{
    compile_query_program, compile_repair_program, CompileOptions, RepairMode, RicPolicy, StabilizerPolicy,
};
use cqa_core::cqa::{self as engine, CqaOptions, CqaResult, Status};
use cqa_core::grounder::DomainDeclaration;
use cqa_core::parser::{emit_dlv, parse_domain, parse_problem, parse_query};
use cqa_core::Value;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;

create_exception!(cqa, CqaError, PyException, "Base class of errors raised by cqa.");
create_exception!(cqa, InputError, CqaError, "Malformed or unsupported input.");
create_exception!(cqa, ResourceLimit, CqaError, "A size or search bound was exceeded.");
create_exception!(
    cqa,
    InconsistentProgram,
    CqaError,
    "The program derives complementary literals."
);

fn to_py(e: cqa_core::Error) -> PyErr {
    match e {
        cqa_core::Error::ResourceLimit(_) | cqa_core::Error::UniverseTooLarge { .. } => {
            ResourceLimit::new_err(e.to_string())
        }
        cqa_core::Error::Inconsistent => InconsistentProgram::new_err(e.to_string()),
        _ => InputError::new_err(e.to_string()),
    }
}

/// Pipeline settings from keyword arguments; names match the CLI flags.
fn options(mode: &str, ric: &str, stabilizer: &str, domain: Option<&str>) -> PyResult<CqaOptions> {
    let mode = match mode {
        "winslett" => RepairMode::Winslett,
        "dalal" => RepairMode::Dalal,
        "defaults" => RepairMode::RawDefaults,
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    let ric = match ric {
        "null" => RicPolicy::NullInsertion,
        "delete" => RicPolicy::DeleteOnly,
        other => return Err(PyValueError::new_err(format!("unknown ric policy `{other}`"))),
    };
    let stabilizer = match stabilizer {
        "guarded" => StabilizerPolicy::Guarded,
        "naive" => StabilizerPolicy::Naive,
        "singletons" => StabilizerPolicy::SingletonsOnly,
        other => return Err(PyValueError::new_err(format!("unknown stabilizer policy `{other}`"))),
    };
    let domain = match domain {
        None => DomainDeclaration::Active,
        Some(text) => DomainDeclaration::Finite(parse_domain(text).map_err(to_py)?),
    };
    Ok(CqaOptions {
        compile: CompileOptions { mode, stabilizer, ric },
        domain,
        ..CqaOptions::default()
    })
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::NoAdmissibleRepair => "no_admissible_repair",
    }
}

/// A repaired instance and its difference from the original.
#[pyclass(frozen, get_all, module = "cqa")]
pub struct Repair {
    pub facts: Vec<String>,
    pub inserted: Vec<String>,
    pub deleted: Vec<String>,
}

#[pymethods]
impl Repair {
    fn __repr__(&self) -> String {
        format!("Repair({{{}}})", self.facts.join(", "))
    }
}

/// Consistent answers to a query.
#[pyclass(frozen, get_all, module = "cqa")]
pub struct Answers {
    pub variables: Vec<String>,
    pub answers: Vec<Py<PyTuple>>,
    /// False when the answers are only a lower bound.
    pub certified_exact: bool,
    pub repairs_count: usize,
    pub status: String,
}

#[pymethods]
impl Answers {
    /// For a closed query: whether it holds in every repair.
    fn is_true(&self) -> bool {
        self.variables.is_empty() && !self.answers.is_empty()
    }

    fn __len__(&self) -> usize {
        self.answers.len()
    }
}

fn value(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Int(i) => i.into_pyobject(py)?.into_any().unbind(),
        Value::Sym(s) => s.into_pyobject(py)?.into_any().unbind(),
    })
}

fn answers(py: Python<'_>, res: CqaResult) -> PyResult<Answers> {
    let tuples = res
        .answers
        .iter()
        .map(|t| {
            let items = t.iter().map(|v| value(py, v)).collect::<PyResult<Vec<_>>>()?;
            Ok(PyTuple::new(py, items)?.unbind())
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(Answers {
        variables: res.variables,
        answers: tuples,
        certified_exact: res.certified_exact,
        repairs_count: res.repairs_count,
        status: status_name(res.status).to_string(),
    })
}

/// Repairs of the instance `facts` under the constraints `ics`.
#[pyfunction]
#[pyo3(signature = (facts, ics, *, mode="winslett", ric="null", stabilizer="guarded", domain=None))]
fn repairs(
    py: Python<'_>,
    facts: &str,
    ics: &str,
    mode: &str,
    ric: &str,
    stabilizer: &str,
    domain: Option<&str>,
) -> PyResult<Vec<Repair>> {
    let opts = options(mode, ric, stabilizer, domain)?;
    let (r, set) = parse_problem(facts, ics).map_err(to_py)?;
    let reps = py.detach(|| engine::repairs_of(&r, &set, &opts)).map_err(to_py)?;
    let strings = |s: &std::collections::BTreeSet<cqa_core::Atom>| s.iter().map(ToString::to_string).collect();
    Ok(reps
        .iter()
        .map(|rep| Repair {
            facts: strings(rep.instance.facts()),
            inserted: strings(&rep.inserted),
            deleted: strings(&rep.deleted),
        })
        .collect())
}

/// Tuples that answer `query` in every repair. With `well_founded=True`
/// the answers come from the well-founded model and may be a lower bound.
#[pyfunction]
#[pyo3(signature = (facts, ics, query, *, mode="winslett", ric="null", stabilizer="guarded", domain=None, well_founded=false))]
#[allow(clippy::too_many_arguments)]
fn consistent_answers(
    py: Python<'_>,
    facts: &str,
    ics: &str,
    query: &str,
    mode: &str,
    ric: &str,
    stabilizer: &str,
    domain: Option<&str>,
    well_founded: bool,
) -> PyResult<Answers> {
    let opts = options(mode, ric, stabilizer, domain)?;
    let (r, set) = parse_problem(facts, ics).map_err(to_py)?;
    let q = parse_query(query, &r.schema).map_err(to_py)?;
    let res = py
        .detach(|| match (q.as_basic(), well_founded) {
            (Some(f), true) => engine::wfs_consistent_answers(f, &r, &set, &opts),
            (None, true) => Err(cqa_core::Error::Unsupported(
                "the well-founded evaluation needs a query without K".into(),
            )),
            (_, false) => engine::evaluate_k_query(&q, &r, &set, &opts),
        })
        .map_err(to_py)?;
    answers(py, res)
}

/// The repair program (and query program, when given) in DLV syntax.
#[pyfunction]
#[pyo3(signature = (facts, ics, query=None, *, mode="winslett", ric="null", stabilizer="guarded"))]
fn compile(facts: &str, ics: &str, query: Option<&str>, mode: &str, ric: &str, stabilizer: &str) -> PyResult<String> {
    let opts = options(mode, ric, stabilizer, None)?;
    let (r, set) = parse_problem(facts, ics).map_err(to_py)?;
    let mut program = compile_repair_program(&set, &r.schema, &opts.compile).map_err(to_py)?;
    if let Some(text) = query {
        let q = parse_query(text, &r.schema).map_err(to_py)?;
        let f = q
            .as_basic()
            .ok_or_else(|| InputError::new_err("only queries without K compile to a single program"))?;
        let query_mode = if opts.compile.mode == RepairMode::Dalal {
            RepairMode::Dalal
        } else {
            RepairMode::Winslett
        };
        let qp = compile_query_program(f, query_mode, &r.schema).map_err(to_py)?;
        program.extend(qp.program.into_rules());
    }
    Ok(emit_dlv(&program))
}

#[pymodule]
fn cqa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CqaError", m.py().get_type::<CqaError>())?;
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add("ResourceLimit", m.py().get_type::<ResourceLimit>())?;
    m.add("InconsistentProgram", m.py().get_type::<InconsistentProgram>())?;
    m.add_class::<Repair>()?;
    m.add_class::<Answers>()?;
    m.add_function(wrap_pyfunction!(repairs, m)?)?;
    m.add_function(wrap_pyfunction!(consistent_answers, m)?)?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    Ok(())
}
