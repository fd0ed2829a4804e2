//! Python bindings: p-adic numbers, group elements, the model of the
//! representation and the check harness.

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

use gsp4_ssc::cli::{self, Format, RunConfig};
use gsp4_ssc::reps::ModelVector;
use gsp4_ssc::{Error, Field};

fn err(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Element of Q_p at finite precision.
#[pyclass(name = "PAdic", frozen)]
pub struct PyPAdic {
    inner: gsp4_ssc::PAdic,
}

#[pymethods]
impl PyPAdic {
    #[new]
    #[pyo3(signature = (p, num, den = 1, prec = 12))]
    fn new(p: u32, num: i64, den: i64, prec: i32) -> PyResult<Self> {
        let f = Field::new(p, prec).map_err(err)?;
        let inner = gsp4_ssc::PAdic::from_ratio(f.p, num, den, f.prec).map_err(err)?;
        Ok(PyPAdic { inner })
    }

    #[getter]
    fn valuation(&self) -> Option<i32> {
        self.inner.valuation()
    }

    #[getter]
    fn precision(&self) -> Option<i32> {
        self.inner.precision()
    }

    /// `(num, den)` of the stored rational representative.
    fn to_rational(&self) -> (i128, i128) {
        self.inner.to_rational()
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyPAdic { inner: self.inner.inv().map_err(err)? })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, o: PyRef<'_, Self>) -> Self {
        PyPAdic { inner: self.inner + o.inner }
    }

    fn __sub__(&self, o: PyRef<'_, Self>) -> Self {
        PyPAdic { inner: self.inner - o.inner }
    }

    fn __mul__(&self, o: PyRef<'_, Self>) -> Self {
        PyPAdic { inner: self.inner * o.inner }
    }

    fn __neg__(&self) -> Self {
        PyPAdic { inner: -self.inner }
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        (self.inner - o.inner).is_zero()
    }

    fn __repr__(&self) -> String {
        format!("PAdic({})", self.inner)
    }
}

/// Element of GSp(4, Q_p).
#[pyclass(name = "GSp4", frozen)]
pub struct PyGSp4 {
    inner: gsp4_ssc::GSp4,
}

#[pymethods]
impl PyGSp4 {
    /// From integer rows; fails unless the matrix is a symplectic similitude.
    #[new]
    #[pyo3(signature = (p, rows, prec = 12))]
    fn new(p: u32, rows: [[i64; 4]; 4], prec: i32) -> PyResult<Self> {
        let f = Field::new(p, prec).map_err(err)?;
        Ok(PyGSp4 { inner: gsp4_ssc::GSp4::from_ints(&f, rows).map_err(err)? })
    }

    /// `diag(varpi^(2i+j), varpi^(i+j), varpi^i, 1)`.
    #[staticmethod]
    #[pyo3(signature = (p, i, j, prec = 12))]
    fn d_pi(p: u32, i: i32, j: i32, prec: i32) -> PyResult<Self> {
        let f = Field::new(p, prec).map_err(err)?;
        Ok(PyGSp4 { inner: gsp4_ssc::gsp4::d_pi(&f, i, j) })
    }

    /// The Atkin-Lehner element of level `n`.
    #[staticmethod]
    #[pyo3(signature = (p, n, prec = 12))]
    fn atkin_lehner(p: u32, n: i32, prec: i32) -> PyResult<Self> {
        let f = Field::new(p, prec).map_err(err)?;
        Ok(PyGSp4 { inner: gsp4_ssc::gsp4::u_n(&f, n) })
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<PyPAdic> {
        if i > 3 || j > 3 {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(PyPAdic { inner: self.inner.entry(i, j) })
    }

    #[getter]
    fn multiplier(&self) -> PyPAdic {
        PyPAdic { inner: self.inner.mu() }
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyGSp4 { inner: self.inner.inv().map_err(err)? })
    }

    fn __mul__(&self, o: PyRef<'_, Self>) -> Self {
        PyGSp4 { inner: self.inner.mul(&o.inner) }
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        self.inner.approx_eq(&o.inner)
    }

    fn __repr__(&self) -> String {
        let rows: Vec<String> = (0..4)
            .map(|i| (0..4).map(|j| self.inner.entry(i, j).to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        format!("GSp4([{}])", rows.join("; "))
    }
}

/// The minimal vector and the newvector of the simple supercuspidal with
/// parameter `t` and sign `eps`. Values are returned as strings in the
/// exact cyclotomic rendering.
#[pyclass(name = "Model", frozen)]
pub struct PyModel {
    inner: gsp4_ssc::reps::Model,
}

fn vector(name: &str) -> PyResult<ModelVector> {
    match name {
        "minimal" => Ok(ModelVector::Minimal),
        "new" => Ok(ModelVector::New),
        "shifted-new" => Ok(ModelVector::ShiftedNew),
        _ => Err(PyValueError::new_err(format!("unknown vector {name}"))),
    }
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (p, t = 1, eps = 1, prec = 12))]
    fn new(p: u32, t: i64, eps: i8, prec: i32) -> PyResult<Self> {
        let f = Field::new(p, prec).map_err(err)?;
        Ok(PyModel { inner: gsp4_ssc::reps::Model::new(&f, f.int(t), eps).map_err(err)? })
    }

    /// Number of `H'`-cosets in the support of the newvector.
    #[getter]
    fn support_size(&self) -> usize {
        self.inner.s.len()
    }

    /// The element `d_{varpi,varpi}`.
    #[getter]
    fn d(&self) -> PyGSp4 {
        PyGSp4 { inner: self.inner.d }
    }

    /// `v(g)` for `v` in `minimal`, `new`, `shifted-new`.
    #[pyo3(signature = (g, vec = "new"))]
    fn eval(&self, g: PyRef<'_, PyGSp4>, vec: &str) -> PyResult<String> {
        Ok(self.inner.eval(&vector(vec)?, &g.inner).map_err(err)?.to_string())
    }

    fn inner_product(&self, v1: &str, v2: &str) -> PyResult<String> {
        Ok(self.inner.inner_product(&vector(v1)?, &vector(v2)?).map_err(err)?.to_string())
    }

    /// Family `family` of the shifted-newvector matrix coefficient at
    /// `u(a, b, c, e)`; each coordinate is a pair `(n, k)` for `n varpi^k`.
    fn matcoeff_family(&self, family: u8, coords: [(i64, i32); 4]) -> PyResult<String> {
        let f = self.inner.f;
        let x: Vec<gsp4_ssc::PAdic> = coords.iter().map(|&(n, k)| f.int(n) * f.pi(k)).collect();
        Ok(self.inner.matcoeff_new_family(family, x[0], x[1], x[2], x[3]).map_err(err)?.to_string())
    }
}

/// Runs a named check (or `all`) and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (check, p = 3, t = 1, sign = 1, c1 = -1, c2 = -1, seed = 0, precision = 12))]
#[allow(clippy::too_many_arguments)]
fn run_check(py: Python<'_>, check: &str, p: u32, t: i64, sign: i8, c1: i64, c2: i64, seed: u64, precision: i32) -> PyResult<String> {
    let cfg = RunConfig { p, t, sign, c1, c2, seed, precision, no_timing: true, ..RunConfig::default() };
    let check = check.to_owned();
    let bytes = py
        .detach(move || cli::run(&check, &cfg).and_then(|r| cli::report_emit(&r, Format::Json)))
        .map_err(err)?;
    String::from_utf8(bytes).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `(formal degree, index of H ∩ K in K)` from the residue enumeration.
#[pyfunction]
#[pyo3(signature = (q, cap = 40_000_000))]
fn formal_degree(py: Python<'_>, q: u32, cap: usize) -> PyResult<(String, u64)> {
    let (deg, orders) = py.detach(move || gsp4_ssc::integrals::formal_degree(q, cap)).map_err(err)?;
    Ok((gsp4_ssc::cyclo::render_rational(&deg), orders.index()))
}

/// Number of pairs `i, j >= 1` with `2i + j <= n - 2`.
#[pyfunction]
fn dim_astar(n: i64) -> i64 {
    gsp4_ssc::reps::dim_astar(n)
}

#[pymodule]
pub fn gsp4_ssc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPAdic>()?;
    m.add_class::<PyGSp4>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add_function(wrap_pyfunction!(formal_degree, m)?)?;
    m.add_function(wrap_pyfunction!(dim_astar, m)?)?;
    Ok(())
}
