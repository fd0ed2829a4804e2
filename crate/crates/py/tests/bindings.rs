use pyo3::prelude::*;
use pyo3::types::PyDict;

#[test]
fn module_works_from_python() {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(gsp4_ssc_py::gsp4_ssc_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("g", m).unwrap();
        let code = c"
x = g.PAdic(3, 5, 9)
assert x.valuation == -2
assert (x * x.inverse()) == g.PAdic(3, 1)
m = g.Model(3, t=1, eps=1)
assert m.support_size == 576
assert m.eval(m.d) == '1'
assert m.inner_product('new', 'new') == '576'
u = g.GSp4.atkin_lehner(3, 5)
assert m.eval(m.d * u) == '1'
assert g.dim_astar(12) == 20
assert g.formal_degree(3) == ('320', 640)
import json
r = json.loads(g.run_check('dims'))
assert r[0]['pass'] and r[0]['computed'].endswith('16,20')
try:
    g.GSp4(3, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    raise SystemExit('accepted a non-symplectic matrix')
except ValueError:
    pass
";
        py.run(code, None, Some(&locals)).unwrap();
    });
}
