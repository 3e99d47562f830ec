use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pysggraph").unwrap();
        pysggraph::pysggraph(&m).unwrap();
        f(py, &m);
    });
}

fn run(py: Python<'_>, m: &Bound<'_, PyModule>, code: &str) -> PyResult<()> {
    let globals = pyo3::types::PyDict::new(py);
    globals.set_item("sg", m)?;
    let code = std::ffi::CString::new(code).unwrap();
    py.run(&code, Some(&globals), None)
}

#[test]
fn exact_table_of_a_pair() {
    with_module(|py, m| {
        run(
            py,
            m,
            "import math\n\
             t = sg.exact_distribution(sg.Model.edge(), sg.Window.rect(0, 1, 0, 0), 1.0)\n\
             assert abs(t['marginals'][0] - 1 / (1 + math.e)) < 1e-12\n\
             assert len(t['probabilities']) == 2\n",
        )
        .unwrap();
    });
}

#[test]
fn samples_are_reproducible_and_inside_the_window() {
    with_module(|py, m| {
        run(
            py,
            m,
            "w = sg.Window.rect(0, 1, 0, 1)\n\
             a = sg.perfect_samples(sg.Model.twostar(), w, 3.0, 50, 11)\n\
             assert a == sg.perfect_samples(sg.Model.twostar(), w, 3.0, 50, 11)\n\
             e = set(w.edges())\n\
             assert all(set(d) <= e for d in a)\n",
        )
        .unwrap();
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|py, m| {
        let err = run(py, m, "sg.perfect_samples(sg.Model.edge(), sg.Window.rect(0, 1, 0, 1), 0.1, 1, 1)").unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let err = run(py, m, "sg.perfect_samples(sg.Model.edge(), sg.Window.rect(0, 3, 0, 3), 3.0, 5, 1, max_rectangles=1)")
            .unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyRuntimeError>(py));
        let err = run(py, m, "sg.Window([(0, 0), (0, 0)])").unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}
