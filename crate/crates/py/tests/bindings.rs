use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module<R>(f: impl FnOnce(Python<'_>, &Bound<'_, PyDict>) -> R) -> R {
    Python::initialize();
    Python::attach(|py| {
        let module = wrap_pymodule!(robin_pcap_py::robin_pcap_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("rp", module).unwrap();
        f(py, &globals)
    })
}

fn eval_f64(py: Python<'_>, globals: &Bound<'_, PyDict>, expr: &str) -> f64 {
    let code = std::ffi::CString::new(expr).unwrap();
    py.eval(&code, Some(globals), None).unwrap().extract().unwrap()
}

#[test]
fn radial_functions() {
    with_module(|py, g| {
        let e = eval_f64(py, g, "rp.ball_energy(rp.Params(3, 2.0, 1.0), 2.0)");
        assert!((e - 16.0 * std::f64::consts::PI / 3.0).abs() < 1e-12 * e);
        let rc = eval_f64(py, g, "rp.critical_radius(rp.Params(3, 2.0, 1.5))");
        assert!((rc - 2.0).abs() < 1e-9);
        let e = eval_f64(py, g, "rp.ball_lower_bound(rp.Params(2, 2.0, 2.0), 4.0 * 3.141592653589793)[1]");
        assert!((e - 2.0).abs() < 1e-12);
        let b2 = eval_f64(py, g, "rp.regime_classify(rp.Params(3, 2.5, 1.0))['beta2']");
        assert!((b2 - 1.53960).abs() < 1e-5);
    });
}

#[test]
fn invalid_input_raises() {
    with_module(|py, g| {
        let err = py.eval(c"rp.Params(2, 0.5, 1.0)", Some(g), None).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(py.eval(c"rp.ball_energy(rp.Params(2, 2.0, 1.0), 0.5)", Some(g), None).is_err());
    });
}

#[test]
fn coarse_pair_solve() {
    with_module(|py, g| {
        let e = eval_f64(
            py,
            g,
            "rp.solve_pair(rp.StarShape((0.0, 0.0), 1.0), rp.StarShape((0.0, 0.0), 2.0), 2.0, 1.0, 64, 8)['energy']",
        );
        assert!((e - 5.2661).abs() < 0.01 * 5.2661);
        let k = eval_f64(py, g, "rp.StarShape((0.0, 0.0), 1.0, [0.0, 0.1]).area()");
        assert!((k - std::f64::consts::PI * (1.0 + 0.005)).abs() < 1e-9);
    });
}
