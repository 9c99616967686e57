use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "branchpath_py").unwrap();
        branchpath_py::branchpath_py(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("bp", m).unwrap();
        f(py, &globals);
    });
}

fn eval_f64(py: Python<'_>, globals: &Bound<'_, PyDict>, expr: &str) -> f64 {
    let code = std::ffi::CString::new(expr).unwrap();
    py.eval(&code, Some(globals), None).unwrap().extract().unwrap()
}

fn run(py: Python<'_>, globals: &Bound<'_, PyDict>, src: &str) -> PyResult<()> {
    let code = std::ffi::CString::new(src).unwrap();
    py.run(&code, Some(globals), None)
}

#[test]
fn free_kernel_round_trips_complex() {
    with_module(|py, g| {
        let k = eval_f64(py, g, "abs(bp.analytic_kernel(0.0, 2.0, 1.0, bp.Lagrangian.free(1.0)))");
        assert!((k - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-15);
    });
}

#[test]
fn sliced_kernel_approaches_closed_form() {
    with_module(|py, g| {
        run(
            py,
            g,
            "grid = bp.Grid(-20.0, 20.0, 801)\n\
             lag = bp.Lagrangian.free(1.0)\n\
             kd = bp.kernel_element(grid, 1.0, 64, lag, 0.0, 1.0)\n\
             ka = bp.analytic_kernel(0.0, 1.0, 1.0, lag)\n\
             err = abs(kd - ka) / abs(ka)",
        )
        .unwrap();
        assert!(eval_f64(py, g, "err") < 1e-2);
    });
}

#[test]
fn gaussian_and_propagation() {
    with_module(|py, g| {
        run(
            py,
            g,
            "grid = bp.Grid(-20.0, 20.0, 801)\n\
             psi = bp.WaveFunction.gaussian(grid, -2.0, 1.0, 2.0)\n\
             out = bp.propagate(psi, 2.0, 64, bp.Lagrangian.free(1.0))\n\
             shift = out.mean_position() - psi.mean_position()",
        )
        .unwrap();
        assert!((eval_f64(py, g, "psi.norm()") - 1.0).abs() < 1e-12);
        assert!((eval_f64(py, g, "shift") - 4.0).abs() < 0.08);
        assert_eq!(eval_f64(py, g, "len(psi.amplitudes())"), 801.0);
    });
}

#[test]
fn domain_errors_raise_branchpath_error() {
    with_module(|py, g| {
        let e = run(py, g, "bp.Grid(1.0, 0.0, 10)").unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let cls = g.get_item("bp").unwrap().unwrap().getattr("BranchpathError").unwrap();
        assert!(e.is_instance(py, &cls));
        // bad unit names are plain ValueErrors
        let e = run(py, g, "bp.analytic_kernel(0.0, 1.0, 1.0, bp.Lagrangian.free(1.0), 'cgs')").unwrap_err();
        assert!(!e.is_instance(py, &cls));
    });
}

#[test]
fn visibility_depends_on_record() {
    with_module(|py, g| {
        run(
            py,
            g,
            "grid = bp.Grid(-8.0, 8.0, 641)\n\
             wp = bp.lift_experiment(grid, record='which-path', recombine=True, lift=2.0)\n\
             nr = bp.lift_experiment(grid, record='none', recombine=True, lift=2.0)",
        )
        .unwrap();
        assert_eq!(eval_f64(py, g, "wp.visibility()"), 0.0);
        let v = eval_f64(py, g, "nr.visibility()");
        assert!((v - 0.95).abs() < 5e-3, "{v}");
        assert!((eval_f64(py, g, "nr.fringe_contrast()") - v).abs() < 5e-3);
    });
}

#[test]
fn mass_sweep_rows_match_prediction() {
    with_module(|py, g| {
        run(py, g, "rows = bp.mass_sweep([1.0, 10.0, 100.0], bp.Grid(-8.0, 8.0, 641))").unwrap();
        for i in 0..3 {
            let v = eval_f64(py, g, &format!("rows[{i}][1]"));
            let p = eval_f64(py, g, &format!("rows[{i}][2]"));
            assert!((v - p).abs() < 1e-6, "{v} vs {p}");
        }
    });
}

#[test]
fn spread_presets() {
    with_module(|py, g| {
        let r = eval_f64(py, g, "bp.GaussianPacket.elevator().spread_rate()");
        assert!((r - 1.054571817e-12).abs() < 1e-20);
    });
}

#[test]
fn catbox_functions() {
    with_module(|py, g| {
        assert!((eval_f64(py, g, "bp.analytic_p_stopped(3600.0, 3600.0)") - 0.5).abs() < 1e-15);
        run(
            py,
            g,
            "import json\n\
             rep = json.loads(bp.compare_engines(2000, 3600.0, 3600.0, 5))\n\
             again = json.loads(bp.compare_engines(2000, 3600.0, 3600.0, 5))\n\
             trial = bp.run_trial('CollapseAtDecay', 3600.0, 3600.0, 1)",
        )
        .unwrap();
        assert_eq!(eval_f64(py, g, "float(rep == again)"), 1.0);
        assert_eq!(eval_f64(py, g, "len(rep['engines'])"), 3.0);
        assert_eq!(eval_f64(py, g, "len(trial)"), 3.0);
        assert!(run(py, g, "bp.compare_engines(10, 3600.0, 3600.0, 5)").is_err());
    });
}
