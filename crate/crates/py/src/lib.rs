//! Python bindings. Exact values (rationals, interval endpoints) cross the
//! boundary as strings; structured results arrive as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use serde::Serialize;

use tensorbound::bounds::{
    bound_corners, bound_measures, bound_removeanx, bound_removeanx_inner, cw_itilde_lower,
    cw_pipeline, detect_corners, group_exponent, lp_balanced_distribution, omega_lower_from_itilde,
    BoundReport,
};
use tensorbound::catalog::{self, CwPerms, Named};
use tensorbound::degeneration::{apply_monomial_map, verify_monomial_degeneration, MonomialMap};
use tensorbound::interval::Interval;
use tensorbound::io::{parse_rational, rational_to_string};
use tensorbound::search::{
    exact_independence, extract_sumfree, monomial_embedding_search, subtensor_embedding_search,
    sumfree_search, SearchOptions, DEFAULT_NODE_BUDGET,
};
use tensorbound::tensor::DEFAULT_SUPPORT_BUDGET;
use tensorbound::{Error, Rational, Triple};

create_exception!(tensorbound_py, TensorboundError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::InvalidDims(_)
        | Error::UnknownGroup(_) => PyValueError::new_err(e.to_string()),
        e => TensorboundError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| TensorboundError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn report<'py>(py: Python<'py>, r: &BoundReport) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &r.to_json())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(PyValueError::new_err)
}

fn number(prec: u32, s: &str) -> PyResult<Interval> {
    match parse_rational(s) {
        Ok(r) => Ok(Interval::from_rational(prec, &r)),
        Err(_) => Interval::from_decimal(prec, s).map_err(err),
    }
}

fn opts(budget: u64, jobs: usize) -> SearchOptions {
    SearchOptions { budget, jobs }
}

/// Sparse tensor over the rationals.
#[pyclass(frozen, eq, module = "tensorbound_py")]
#[derive(PartialEq)]
struct Tensor(tensorbound::Tensor);

#[pymethods]
impl Tensor {
    /// `terms` holds `(i, j, k)` or `(i, j, k, coefficient)`; a coefficient
    /// is an int or a string such as `"-3/2"`.
    #[new]
    fn new(dims: (usize, usize, usize), terms: Vec<Bound<'_, PyTuple>>) -> PyResult<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let (i, j, k): (usize, usize, usize) = (
                t.get_item(0)?.extract()?,
                t.get_item(1)?.extract()?,
                t.get_item(2)?.extract()?,
            );
            let c = match t.len() {
                3 => Rational::from_integer(1.into()),
                4 => rational(&t.get_item(3)?.str()?.to_cow()?)?,
                n => {
                    return Err(PyValueError::new_err(format!(
                        "a term has 3 or 4 entries, got {n}"
                    )))
                }
            };
            out.push((Triple::new(i, j, k), c));
        }
        tensorbound::Tensor::new([dims.0, dims.1, dims.2], out)
            .map(Tensor)
            .map_err(err)
    }

    /// A catalog tensor, e.g. `Tensor.named("cw", 4)` or `Tensor.named("group", "Q8")`.
    #[staticmethod]
    #[pyo3(signature = (name, *params))]
    fn named(name: &str, params: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let params = params
            .iter()
            .map(|p| Ok(p.str()?.to_cow()?.into_owned()))
            .collect::<PyResult<Vec<String>>>()?;
        let entry = Named::parse(name, &params)
            .and_then(|n| n.build())
            .map_err(err)?;
        Ok(Tensor(entry.tensor))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        tensorbound::io::tensor_from_json(s)
            .map(Tensor)
            .map_err(err)
    }

    #[staticmethod]
    fn from_text(s: &str) -> PyResult<Self> {
        tensorbound::io::tensor_from_text(s)
            .map(Tensor)
            .map_err(err)
    }

    fn to_json(&self) -> String {
        tensorbound::io::tensor_to_json(&self.0)
    }

    fn to_text(&self) -> String {
        tensorbound::io::tensor_to_text(&self.0)
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        let [a, b, c] = self.0.dims();
        (a, b, c)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Tensor(dims={:?}, terms={})", self.0.dims(), self.0.len())
    }

    /// `(i, j, k, coefficient)` in lexicographic order.
    fn terms(&self) -> Vec<(usize, usize, usize, String)> {
        self.0
            .terms()
            .map(|(t, c)| (t.i, t.j, t.k, rational_to_string(c)))
            .collect()
    }

    fn tensor_product(&self, other: &Tensor) -> Tensor {
        Tensor(self.0.tensor_product(&other.0))
    }

    fn power(&self, n: usize) -> PyResult<Tensor> {
        self.0
            .power(n, DEFAULT_SUPPORT_BUDGET)
            .map(Tensor)
            .map_err(err)
    }

    fn is_subtensor_of(&self, other: &Tensor) -> bool {
        self.0.is_subtensor_of(&other.0)
    }

    /// Product of the three minimal-set sizes.
    fn measure(&self) -> u128 {
        self.0.measure()
    }

    fn is_square(&self) -> bool {
        self.0.is_square()
    }
}

#[pyclass(frozen, module = "tensorbound_py")]
struct Group(tensorbound::Group);

#[pymethods]
impl Group {
    /// A builtin group by name, e.g. `"C5"`, `"C2xC2"`, `"Q8"`.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        tensorbound::Group::by_name(name).map(Group).map_err(err)
    }

    /// A group from its Cayley table; the axioms are checked.
    #[staticmethod]
    #[pyo3(signature = (name, table, identity=0))]
    fn from_table(name: &str, table: Vec<Vec<usize>>, identity: usize) -> PyResult<Self> {
        tensorbound::Group::from_table(name, table, identity)
            .map(Group)
            .map_err(err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn identity(&self) -> usize {
        self.0.identity()
    }

    fn table(&self) -> Vec<Vec<usize>> {
        self.0.table().to_vec()
    }

    fn is_abelian(&self) -> bool {
        self.0.is_abelian()
    }

    /// The structure tensor with terms `(a, b, ab)`.
    fn tensor(&self) -> Tensor {
        Tensor(catalog::group_tensor(&self.0).tensor)
    }

    fn __repr__(&self) -> String {
        format!("Group({:?}, order={})", self.0.name(), self.0.order())
    }
}

/// Exact independence number of `t^⊗power`, with a witness.
#[pyfunction]
#[pyo3(signature = (t, power=1, budget=DEFAULT_NODE_BUDGET, jobs=1))]
fn independence<'py>(
    py: Python<'py>,
    t: &Tensor,
    power: usize,
    budget: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let p = t.0.power(power, DEFAULT_SUPPORT_BUDGET).map_err(err)?;
    let r = py.detach(|| exact_independence(&p, opts(budget, jobs)));
    to_py(py, &r)
}

/// Largest tri-colored sum-free set in `G^n`.
#[pyfunction]
#[pyo3(signature = (group, n=1, budget=DEFAULT_NODE_BUDGET))]
fn sumfree<'py>(
    py: Python<'py>,
    group: &Group,
    n: usize,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| sumfree_search(&group.0, n, opts(budget, 1)))
        .map_err(err)?;
    let set = extract_sumfree(&group.0, n, &r.witness).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("exact", r.exact)?;
    d.set_item("set", to_py(py, &set)?)?;
    Ok(d.into_any())
}

/// Searches for `a` in `b` as a sub-tensor, or with `monomial=True` as a
/// monomial degeneration of a sub-tensor.
#[pyfunction]
#[pyo3(signature = (a, b, monomial=false, group=None, budget=DEFAULT_NODE_BUDGET, jobs=1))]
fn embed<'py>(
    py: Python<'py>,
    a: &Tensor,
    b: &Tensor,
    monomial: bool,
    group: Option<&Group>,
    budget: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let g = group.map(|g| &g.0);
    if monomial {
        let r = py
            .detach(|| monomial_embedding_search(&a.0, &b.0, opts(budget, jobs), g))
            .map_err(err)?;
        to_py(py, &r)
    } else {
        let r = py
            .detach(|| subtensor_embedding_search(&a.0, &b.0, opts(budget, jobs), g))
            .map_err(err)?;
        to_py(py, &r)
    }
}

/// Terms of `source` whose weights `a[i] + b[j] + c[k]` sum to zero.
#[pyfunction]
fn apply_map(source: &Tensor, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> PyResult<Tensor> {
    apply_monomial_map(&source.0, &MonomialMap { a, b, c })
        .map(Tensor)
        .map_err(err)
}

/// Checks that the weights degenerate `source` to exactly `claimed`.
#[pyfunction]
fn verify_degeneration<'py>(
    py: Python<'py>,
    source: &Tensor,
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
    claimed: &Tensor,
) -> PyResult<Bound<'py, PyAny>> {
    let r = verify_monomial_degeneration(&source.0, &MonomialMap { a, b, c }, &claimed.0)
        .map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("valid", r.valid)?;
    d.set_item("violations", to_py(py, &r.violations)?)?;
    Ok(d.into_any())
}

#[pyfunction]
#[pyo3(signature = (t, precision=128))]
fn corner_bound<'py>(py: Python<'py>, t: &Tensor, precision: u32) -> PyResult<Bound<'py, PyAny>> {
    if detect_corners(&t.0).is_none() || !t.0.is_square() {
        return Err(TensorboundError::new_err(
            "the corner bound needs a square tensor with corner terms",
        ));
    }
    report(py, &bound_corners(t.0.dims()[0], precision).map_err(err)?)
}

/// Sum of cube roots of part measures over the trivial partition, or the
/// three-part CW partition with `cw=True`.
#[pyfunction]
#[pyo3(signature = (t, cw=false, precision=128))]
fn measures_bound<'py>(
    py: Python<'py>,
    t: &Tensor,
    cw: bool,
    precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let p = if cw {
        catalog::cw_three_partition(&t.0).map_err(err)?
    } else {
        tensorbound::Partition::trivial(&t.0)
    };
    report(py, &bound_measures(&t.0, &p, precision).map_err(err)?)
}

/// x-removal bound for `CW_q` given an upper bound `c` on the remainder,
/// or the bound on the remainder itself when `c` is omitted.
#[pyfunction]
#[pyo3(signature = (q, c=None, precision=128))]
fn removeanx_bound<'py>(
    py: Python<'py>,
    q: usize,
    c: Option<&str>,
    precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let r = match c {
        Some(c) => bound_removeanx(q, &number(precision, c)?),
        None => bound_removeanx_inner(q, precision),
    };
    report(py, &r.map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (t, eps="0"))]
fn balanced_lp<'py>(py: Python<'py>, t: &Tensor, eps: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &lp_balanced_distribution(&t.0, &rational(eps)?).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (q, precision=128))]
fn cw_lower<'py>(py: Python<'py>, q: usize, precision: u32) -> PyResult<Bound<'py, PyAny>> {
    report(py, &cw_itilde_lower(q, precision).map_err(err)?)
}

/// ω_g lower bound from `r` and an upper bound `u` on Ĩ; decimal strings or rationals.
#[pyfunction]
#[pyo3(signature = (r, u, precision=128))]
fn omega_lower<'py>(
    py: Python<'py>,
    r: &str,
    u: &str,
    precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    report(
        py,
        &omega_lower_from_itilde(&number(precision, r)?, &number(precision, u)?).map_err(err)?,
    )
}

/// All bound paths on generalized `CW_q`; `sigma` is 1-based.
#[pyfunction]
#[pyo3(signature = (q, sigma=None, precision=128))]
fn pipeline<'py>(
    py: Python<'py>,
    q: usize,
    sigma: Option<Vec<usize>>,
    precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let perms = sigma.map_or_else(|| CwPerms::identity(q), CwPerms::with_sigma);
    perms.validate(q).map_err(err)?;
    to_py(py, &cw_pipeline(q, &perms, precision).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (group, precision=128, budget=DEFAULT_NODE_BUDGET))]
fn group_bound<'py>(
    py: Python<'py>,
    group: &Group,
    precision: u32,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| group_exponent(&group.0, 2, opts(budget, 1), precision))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (target, precision=128, jobs=1))]
fn reproduce<'py>(
    py: Python<'py>,
    target: &str,
    precision: u32,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| {
            tensorbound::reproduce::reproduce(target, precision, opts(DEFAULT_NODE_BUDGET, jobs))
        })
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn tensorbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TensorboundError", m.py().get_type::<TensorboundError>())?;
    m.add("TARGETS", tensorbound::reproduce::TARGETS.to_vec())?;
    m.add_class::<Tensor>()?;
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(independence, m)?)?;
    m.add_function(wrap_pyfunction!(sumfree, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(apply_map, m)?)?;
    m.add_function(wrap_pyfunction!(verify_degeneration, m)?)?;
    m.add_function(wrap_pyfunction!(corner_bound, m)?)?;
    m.add_function(wrap_pyfunction!(measures_bound, m)?)?;
    m.add_function(wrap_pyfunction!(removeanx_bound, m)?)?;
    m.add_function(wrap_pyfunction!(balanced_lp, m)?)?;
    m.add_function(wrap_pyfunction!(cw_lower, m)?)?;
    m.add_function(wrap_pyfunction!(omega_lower, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(group_bound, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
