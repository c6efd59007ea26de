//! Python bindings: parameters, runs and traces, the decision functions,
//! finite-set pullbacks and pushouts, engine comparison and stability.

use momat_core::catcore::{finset_pullback, finset_pushout, CatError, FinSet, FinSetMap};
use momat_core::decisions::{self, DecisionError, PeriodMetrics};
use momat_core::evolution::{max_divergence, stability_report, EvolutionError};
use momat_core::ledger::{AccountId, Endowments, Invariances};
use momat_core::trace::{columns, write_csv};
use momat_core::{EngineKind, Parameters, Trace};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    momat,
    MomatError,
    PyException,
    "A run or booking was rejected."
);

fn param_err(e: DecisionError) -> PyErr {
    match e {
        DecisionError::UnknownParameter(k) => PyKeyError::new_err(k),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn run_err(e: EvolutionError) -> PyErr {
    match e {
        EvolutionError::Parameters(p) => param_err(p),
        other => MomatError::new_err(other.to_string()),
    }
}

fn cat_err(e: CatError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn engine(name: &str) -> PyResult<EngineKind> {
    name.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown engine `{name}`")))
}

/// Model parameters. Keyword arguments override the defaults.
#[pyclass(name = "Params", module = "momat")]
struct PyParams {
    inner: Parameters,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = Parameters::default();
        if let Some(kw) = overrides {
            for (k, v) in kw.iter() {
                inner
                    .set(&k.extract::<String>()?, v.extract::<f64>()?)
                    .map_err(param_err)?;
            }
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn keys() -> Vec<&'static str> {
        Parameters::KEYS.to_vec()
    }

    fn get(&self, key: &str) -> PyResult<f64> {
        self.inner.get(key).map_err(param_err)
    }

    fn set(&mut self, key: &str, value: f64) -> PyResult<()> {
        self.inner.set(key, value).map_err(param_err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for &k in Parameters::KEYS {
            d.set_item(k, self.inner.get(k).map_err(param_err)?)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = Parameters::KEYS
            .iter()
            .map(|&k| format!("{k}={}", self.inner.get(k).unwrap_or(f64::NAN)))
            .collect();
        format!("Params({})", body.join(", "))
    }
}

fn params_or_default(p: Option<PyRef<'_, PyParams>>) -> Parameters {
    p.map(|p| p.inner).unwrap_or_default()
}

/// A simulated trace: one row per period.
#[pyclass(name = "Trace", module = "momat", frozen)]
struct PyTrace {
    inner: Trace,
}

fn row_values(r: &momat_core::evolution::TraceRow) -> Vec<f64> {
    let mut v = Vec::with_capacity(columns().len());
    v.push(r.period as f64);
    v.extend(r.metrics.as_array());
    v.extend(r.accounts.balances());
    v.extend(r.invariances.as_array());
    v
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn engine(&self) -> &'static str {
        self.inner.engine.name()
    }

    #[staticmethod]
    fn columns() -> Vec<&'static str> {
        columns()
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }

    /// Rows as lists of floats in column order.
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows.iter().map(row_values).collect()
    }

    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        let i = columns()
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Ok(self.inner.rows.iter().map(|r| row_values(r)[i]).collect())
    }

    fn max_invariance(&self) -> f64 {
        self.inner.max_invariance()
    }

    fn final_accounts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (a, v) in self.inner.final_accounts.iter() {
            d.set_item(a.name(), v)?;
        }
        Ok(d)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_csv(&mut buf, &self.inner.rows, &[])
            .map_err(|e| MomatError::new_err(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| MomatError::new_err(e.to_string()))
    }

    /// Boundedness and late drift; needs at least twenty rows.
    fn stability<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = stability_report(&self.inner).map_err(run_err)?;
        let d = PyDict::new(py);
        d.set_item("bounded", report.bounded)?;
        let drift = PyDict::new(py);
        for s in &report.series {
            drift.set_item(&s.name, s.drift)?;
        }
        d.set_item("drift", drift)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace(engine={}, rows={})",
            self.inner.engine.name(),
            self.inner.rows.len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (horizon=100, engine="oracle", params=None, com_lab_0=110.0, com_res_0=20.0))]
fn run(
    py: Python<'_>,
    horizon: u64,
    engine: &str,
    params: Option<PyRef<'_, PyParams>>,
    com_lab_0: f64,
    com_res_0: f64,
) -> PyResult<PyTrace> {
    let kind = self::engine(engine)?;
    let p = params_or_default(params);
    let e = Endowments {
        com_lab: com_lab_0,
        com_res: com_res_0,
    };
    let trace = py
        .detach(|| momat_core::run(&p, &e, horizon, kind))
        .map_err(run_err)?;
    Ok(PyTrace { inner: trace })
}

/// Largest absolute difference between the two engines' traces.
#[pyfunction]
#[pyo3(signature = (horizon=100, params=None))]
fn compare(py: Python<'_>, horizon: u64, params: Option<PyRef<'_, PyParams>>) -> PyResult<f64> {
    let p = params_or_default(params);
    let e = Endowments::default();
    py.detach(|| {
        let a = momat_core::run(&p, &e, horizon, EngineKind::RecursiveOracle)?;
        let b = momat_core::run(&p, &e, horizon, EngineKind::Categorical)?;
        Ok(max_divergence(&a, &b))
    })
    .map_err(run_err)
}

#[pyfunction]
fn metric_names() -> Vec<&'static str> {
    PeriodMetrics::NAMES.to_vec()
}

#[pyfunction]
fn account_names() -> Vec<&'static str> {
    AccountId::ALL.iter().map(|a| a.name()).collect()
}

#[pyfunction]
fn invariance_names() -> Vec<&'static str> {
    Invariances::NAMES.to_vec()
}

#[pyfunction]
fn production(labor: f64, resources: f64, alpha: f64, gamma: f64) -> f64 {
    decisions::production(labor, resources, alpha, gamma)
}

#[pyfunction]
fn investment_sigmoid(demand_surplus: f64, floor: f64, span: f64, scale: f64) -> f64 {
    decisions::investment_sigmoid(demand_surplus, floor, span, scale)
}

#[pyfunction]
fn demand_plan(wages: f64, repays: f64, markup: f64) -> f64 {
    decisions::demand_plan(wages, repays, markup)
}

#[pyfunction]
fn dividend_decision(diff: f64, opening_balance: f64, delta_c: f64, delta_b: f64) -> f64 {
    decisions::dividend_decision(diff, opening_balance, delta_c, delta_b)
}

#[pyfunction]
#[pyo3(signature = (demand_plan, good_production, demand_surplus, windfall, period, initial_price))]
fn good_price(
    demand_plan: f64,
    good_production: f64,
    demand_surplus: f64,
    windfall: f64,
    period: u64,
    initial_price: f64,
) -> f64 {
    decisions::good_price(
        demand_plan,
        good_production,
        demand_surplus,
        windfall,
        period,
        initial_price,
    )
}

/// Pushes onto a contract memory: prepends `x` and drops the last entry.
#[pyfunction]
fn memory_push(hist: Vec<f64>, x: f64) -> PyResult<Vec<f64>> {
    decisions::memory_push(&hist, x).map_err(param_err)
}

fn finmap(
    domain: &[String],
    codomain: &[String],
    pairs: &[(String, String)],
) -> PyResult<FinSetMap> {
    let pairs: Vec<(&str, &str)> = pairs
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    FinSetMap::from_pairs(
        FinSet::new(domain.iter().cloned()),
        FinSet::new(codomain.iter().cloned()),
        &pairs,
    )
    .map_err(cat_err)
}

/// Pullback of `f: A → C` and `g: B → C`, each given as `(x, f(x))` pairs.
/// Returns the matching `(a, b)` label pairs.
#[pyfunction]
fn pullback(
    a: Vec<String>,
    b: Vec<String>,
    c: Vec<String>,
    f: Vec<(String, String)>,
    g: Vec<(String, String)>,
) -> PyResult<Vec<(String, String)>> {
    let pb = finset_pullback(&finmap(&a, &c, &f)?, &finmap(&b, &c, &g)?).map_err(cat_err)?;
    Ok(pb
        .pairs
        .iter()
        .map(|&(i, j)| (a[i].clone(), b[j].clone()))
        .collect())
}

/// Pushout of `f: C → A` and `g: C → B`. Returns the class labels.
#[pyfunction]
fn pushout(
    c: Vec<String>,
    a: Vec<String>,
    b: Vec<String>,
    f: Vec<(String, String)>,
    g: Vec<(String, String)>,
) -> PyResult<Vec<String>> {
    let po = finset_pushout(&finmap(&c, &a, &f)?, &finmap(&c, &b, &g)?).map_err(cat_err)?;
    Ok(po.apex.labels().to_vec())
}

#[pymodule]
fn momat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MomatError", m.py().get_type::<MomatError>())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(metric_names, m)?)?;
    m.add_function(wrap_pyfunction!(account_names, m)?)?;
    m.add_function(wrap_pyfunction!(invariance_names, m)?)?;
    m.add_function(wrap_pyfunction!(production, m)?)?;
    m.add_function(wrap_pyfunction!(investment_sigmoid, m)?)?;
    m.add_function(wrap_pyfunction!(demand_plan, m)?)?;
    m.add_function(wrap_pyfunction!(dividend_decision, m)?)?;
    m.add_function(wrap_pyfunction!(good_price, m)?)?;
    m.add_function(wrap_pyfunction!(memory_push, m)?)?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    m.add_function(wrap_pyfunction!(pushout, m)?)?;
    Ok(())
}
