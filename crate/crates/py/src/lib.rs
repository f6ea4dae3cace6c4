//! Python bindings: response models, the analysis pipeline and finite
//! groupoid checks. Groupoid and subgroupoid files cross the boundary as JSON text.

use morpho_core::groupoid::io::{groupoid_to_json, parse_groupoid, parse_subgroupoid, subgroupoid_to_json};
use morpho_core::groupoid::{self as gpd, FiniteGroupoid};
use morpho_core::report::{self, AnalysisError, BodyGrid, GridSpec};
use morpho_core::response::{EvalPoint, SCENARIOS};
use morpho_core::symmetry::{symmetry_algebra as sym_algebra, SamplingConfig};
use morpho_core::{ClassificationReport, ResponseModel};
use nalgebra::Matrix3;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn analysis_err(e: AnalysisError) -> PyErr {
    match e {
        AnalysisError::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        _ => value_err(e),
    }
}

/// A constitutive law `W(t, x, F)` with one or more scalar components.
#[pyclass(name = "Model", module = "morpho", frozen)]
struct PyModel {
    inner: ResponseModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (source, name = "model"))]
    fn new(source: &str, name: &str) -> PyResult<Self> {
        let inner = morpho_core::parse_response(source).map_err(value_err)?.with_name(name);
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn source(&self) -> &str {
        &self.inner.source
    }

    #[getter]
    fn components(&self) -> usize {
        self.inner.component_count()
    }

    /// Values and first derivatives at `(t, x, F)`, `F` given as 3 rows.
    /// Returns `(value, d_t, d_x, d_F)`: `d_x[c][k]`, `d_F[c]` a 3×3 nested list.
    #[allow(clippy::type_complexity)]
    fn jet(&self, t: f64, x: [f64; 3], f: [[f64; 3]; 3]) -> PyResult<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>)> {
        let f = nalgebra_matrix(f);
        let jet = self.inner.eval_with_jet(&EvalPoint { t, x, f }).map_err(value_err)?;
        let m = jet.components();
        let d_x = (0..m).map(|c| (0..3).map(|k| jet.d_x[(c, k)]).collect()).collect();
        let d_f = (0..m)
            .map(|c| {
                let g = jet.d_f_matrix(c);
                (0..3).map(|i| (0..3).map(|j| g[(i, j)]).collect()).collect()
            })
            .collect();
        Ok((jet.value.iter().copied().collect(), jet.d_t.iter().copied().collect(), d_x, d_f))
    }

    fn __repr__(&self) -> String {
        format!("Model({:?}, name={:?})", self.inner.source, self.inner.name)
    }
}

fn nalgebra_matrix(rows: [[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

/// Result of `analyze`.
#[pyclass(name = "Report", module = "morpho", frozen)]
struct PyReport {
    inner: ClassificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn evolution(&self) -> String {
        self.inner.verdicts.evolution.to_string()
    }

    #[getter]
    fn morphogenesis(&self) -> String {
        self.inner.verdicts.morphogenesis.to_string()
    }

    #[getter]
    fn jump_nodes(&self) -> Vec<usize> {
        self.inner.jump_nodes.clone()
    }

    #[getter]
    fn sym_dims(&self) -> Vec<usize> {
        self.inner.nodes.iter().map(|n| n.sym_dim).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

#[pyfunction]
fn scenario(name: &str) -> PyResult<PyModel> {
    let inner = morpho_core::builtin_scenario(name).map_err(value_err)?;
    Ok(PyModel { inner })
}

#[pyfunction]
fn scenarios() -> Vec<&'static str> {
    SCENARIOS.to_vec()
}

/// Symmetry algebra at one point: `(dim, basis)` with each basis element a
/// flattened row-major 3×3 matrix.
#[pyfunction]
#[pyo3(signature = (model, t, x, samples = 40, seed = 42, rel_tol = 1e-8, det_floor = 0.2))]
fn symmetry_algebra(
    model: &PyModel,
    t: f64,
    x: [f64; 3],
    samples: usize,
    seed: u64,
    rel_tol: f64,
    det_floor: f64,
) -> PyResult<(usize, Vec<Vec<f64>>)> {
    let config = SamplingConfig {
        seed,
        samples,
        det_floor,
        rel_tol,
    };
    let alg = sym_algebra(&model.inner, t, x, &config.deformations(), rel_tol)
        .map_err(|e| PyArithmeticError::new_err(e.to_string()))?;
    let basis = (0..alg.dim).map(|k| alg.basis.basis.column(k).iter().copied().collect()).collect();
    Ok((alg.dim, basis))
}

/// Runs the full pipeline. `x1_range = (lo, hi, n)` switches to full-body
/// mode with `x2, x3` taken from `x`.
#[pyfunction]
#[pyo3(signature = (
    model, t_min = -1.0, t_max = 1.0, t_steps = 41, x = [0.0; 3], x1_range = None,
    samples = 40, rel_tol = 1e-8, seed = 42, det_floor = 0.2, x_step = 1e-2, threads = None
))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    py: Python<'_>,
    model: &PyModel,
    t_min: f64,
    t_max: f64,
    t_steps: usize,
    x: [f64; 3],
    x1_range: Option<(f64, f64, usize)>,
    samples: usize,
    rel_tol: f64,
    seed: u64,
    det_floor: f64,
    x_step: f64,
    threads: Option<usize>,
) -> PyResult<PyReport> {
    let body = match x1_range {
        None => BodyGrid::Fixed { x },
        Some((lo, hi, steps)) => BodyGrid::X1Range {
            lo,
            hi,
            steps,
            x2: x[1],
            x3: x[2],
        },
    };
    let grid = GridSpec {
        t_min,
        t_max,
        t_steps,
        body,
        seed,
        samples,
        rel_tol,
        det_floor,
        x_step,
    };
    let inner = py
        .detach(|| report::analyze_with_threads(&model.inner, &grid, threads))
        .map_err(analysis_err)?;
    Ok(PyReport { inner })
}

/// A finite groupoid loaded from the JSON table format.
#[pyclass(name = "Groupoid", module = "morpho", frozen)]
struct PyGroupoid {
    inner: FiniteGroupoid,
}

impl PyGroupoid {
    fn sub(&self, sub_json: &str) -> PyResult<gpd::Subgroupoid> {
        let sub = parse_subgroupoid(sub_json, &self.inner).map_err(value_err)?;
        if let Some(d) = sub.defect(&self.inner) {
            return Err(PyValueError::new_err(format!("not a subgroupoid: {d:?}")));
        }
        Ok(sub)
    }
}

#[pymethods]
impl PyGroupoid {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_groupoid(text).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        groupoid_to_json(&self.inner)
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.object_names().to_vec()
    }

    #[getter]
    fn arrows(&self) -> Vec<String> {
        self.inner.arrow_names().to_vec()
    }

    /// Axiom violations as `(axiom, arrows, detail)`; empty for a groupoid.
    fn violations(&self) -> Vec<(String, Vec<String>, String)> {
        let g = &self.inner;
        g.validate()
            .into_iter()
            .map(|v| {
                let arrows = v.arrows.iter().map(|&a| g.arrow_name(a).to_string()).collect();
                (v.axiom.to_string(), arrows, v.detail)
            })
            .collect()
    }

    fn orbits(&self) -> Vec<Vec<String>> {
        let g = &self.inner;
        g.orbits()
            .into_iter()
            .map(|o| o.into_iter().map(|x| g.object_name(x).to_string()).collect())
            .collect()
    }

    fn is_transitive(&self) -> bool {
        self.inner.is_transitive()
    }

    /// `None` when the subgroupoid is normal, else a witness `(g, h, g·h·g⁻¹)`.
    fn normality_witness(&self, sub_json: &str) -> PyResult<Option<(String, String, String)>> {
        let sub = self.sub(sub_json)?;
        let g = &self.inner;
        Ok(gpd::normality_witness(g, &sub).map(|w| {
            (
                g.arrow_name(w.g).to_string(),
                g.arrow_name(w.h).to_string(),
                g.arrow_name(w.conjugate).to_string(),
            )
        }))
    }

    fn is_normal(&self, sub_json: &str) -> PyResult<bool> {
        Ok(self.normality_witness(sub_json)?.is_none())
    }

    /// The normalizoid as a subgroupoid JSON document.
    fn normalizoid(&self, sub_json: &str) -> PyResult<String> {
        let sub = self.sub(sub_json)?;
        Ok(subgroupoid_to_json(&self.inner, &gpd::normalizoid(&self.inner, &sub)))
    }
}

/// The two-object S3 counterexample as `(groupoid, subgroupoid_json)`.
#[pyfunction]
fn counterexample() -> (PyGroupoid, String) {
    let (g, h) = gpd::counterexample();
    let sub = subgroupoid_to_json(&g, &h);
    (PyGroupoid { inner: g }, sub)
}

#[pymodule]
fn morpho(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", morpho_core::VERSION)?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyGroupoid>()?;
    m.add_function(wrap_pyfunction!(scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
