//! Python bindings: `import qhi`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use qhi_core::linalg::C64;
use qhi_core::pipeline::{self, PipelineError, RunConfig, Stage, SweepSpec, WordInput};
use qhi_core::report::{complexes, InvariantReport};
use qhi_core::roots::RootSelectors;
use qhi_core::shear::{self, SeedGrid, ShearWeights, SolverOptions, SurfaceKind};
use qhi_core::word::{self, IntMatrix2x2, Letter, MappingClassWord};

create_exception!(
    qhi,
    QhiError,
    PyException,
    "Pipeline failure; args are (stage, kind, message)."
);

fn raise(e: PipelineError) -> PyErr {
    let stage = serde_json::to_value(e.stage)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    QhiError::new_err((stage, e.kind, e.message))
}

fn at<E: std::fmt::Debug + std::fmt::Display>(stage: Stage) -> impl Fn(E) -> PyErr {
    move |e| raise(PipelineError::at(stage, &e))
}

fn parse_word(text: &str) -> PyResult<MappingClassWord> {
    text.parse().map_err(at(Stage::Word))
}

fn parse_surface(name: &str) -> PyResult<SurfaceKind> {
    name.parse()
        .map_err(|m: String| raise(PipelineError::new(Stage::Config, "InvalidSurface", m)))
}

type Matrix = ((i64, i64), (i64, i64));

fn matrix(m: Matrix) -> PyResult<IntMatrix2x2> {
    let ((a, b), (c, d)) = m;
    IntMatrix2x2::new(a, b, c, d).map_err(at(Stage::Word))
}

fn rows(m: &IntMatrix2x2) -> Matrix {
    let [[a, b], [c, d]] = m.entries();
    ((a, b), (c, d))
}

fn solver_options(seed_grid: Option<&str>) -> PyResult<SolverOptions> {
    let mut opts = SolverOptions::default();
    if let Some(g) = seed_grid {
        opts.grid = g.parse::<SeedGrid>().map_err(at(Stage::Config))?;
    }
    Ok(opts)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// `((a, b), (c, d))` for a word in R and L.
#[pyfunction]
fn word_to_matrix(word: &str) -> PyResult<Matrix> {
    Ok(rows(
        &word::word_to_matrix(&parse_word(word)?).map_err(at(Stage::Word))?,
    ))
}

/// Cyclic normal form of the conjugacy class of `matrix`.
#[pyfunction]
fn decompose(matrix: Matrix) -> PyResult<String> {
    Ok(word::decompose(&self::matrix(matrix)?)
        .map_err(at(Stage::Word))?
        .to_string())
}

#[pyfunction]
fn cyclic_normalize(word: &str) -> PyResult<String> {
    Ok(word::cyclic_normalize(&parse_word(word)?).to_string())
}

/// One flip step; returns `(x1, x2)` after `letter`.
#[pyfunction]
#[pyo3(signature = (x1, x2, letter, surface = "torus", h_n = C64::new(1.0, 0.0)))]
fn step(x1: C64, x2: C64, letter: char, surface: &str, h_n: C64) -> PyResult<(C64, C64)> {
    let letter = match letter {
        'R' => Letter::R,
        'L' => Letter::L,
        other => {
            return Err(raise(PipelineError::new(
                Stage::Word,
                "InvalidLetter",
                format!("{other:?}"),
            )))
        }
    };
    let out = shear::step(
        &ShearWeights::new(x1, x2, h_n),
        letter,
        parse_surface(surface)?,
    )
    .map_err(at(Stage::Evolve))?;
    Ok((out.x1, out.x2))
}

/// All periodic points found from the seed grid, as dicts.
#[pyfunction]
#[pyo3(signature = (word, surface = "torus", seed_grid = None))]
fn solve_periodic<'py>(
    py: Python<'py>,
    word: &str,
    surface: &str,
    seed_grid: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let word = parse_word(word)?;
    let opts = solver_options(seed_grid)?;
    let sols = shear::solve_periodic(&word, parse_surface(surface)?, C64::new(1.0, 0.0), &opts)
        .map_err(at(Stage::Solve))?;
    json_to_py(py, &serde_json::to_string(&sols).expect("finite values"))
}

/// A computed invariant.
#[pyclass(frozen, name = "Report")]
struct PyReport {
    inner: InvariantReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn word(&self) -> &str {
        &self.inner.word
    }

    #[getter]
    fn surface(&self) -> &'static str {
        self.inner.surface.name()
    }

    #[getter(N)]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn flags(&self) -> Vec<String> {
        self.inner.flags.clone()
    }

    #[getter]
    fn failures(&self) -> Vec<String> {
        self.inner.failures.clone()
    }

    /// `C` as nested lists of complex.
    #[getter]
    fn matrix(&self) -> Vec<Vec<C64>> {
        self.inner.c.iter().map(|row| complexes(row)).collect()
    }

    #[getter]
    fn spectrum_ratios(&self) -> Vec<C64> {
        complexes(&self.inner.spectrum_ratios)
    }

    #[getter]
    fn char_poly(&self) -> Vec<C64> {
        complexes(&self.inner.char_poly)
    }

    #[getter]
    fn condition_number(&self) -> f64 {
        self.inner.condition_number
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(surface={:?}, word={:?}, N={}, passed={})",
            self.surface(),
            self.inner.word,
            self.inner.n,
            if self.inner.passed { "True" } else { "False" }
        )
    }
}

/// Runs the full pipeline for a word or a matrix.
#[pyfunction]
#[pyo3(signature = (
    word = None, *, matrix = None, surface = "torus", N = 3, k = 1,
    selectors_u = vec![], selectors_v = vec![], weights = None, seed_grid = None
))]
#[allow(non_snake_case, clippy::too_many_arguments)]
fn run(
    word: Option<&str>,
    matrix: Option<Matrix>,
    surface: &str,
    N: usize,
    k: i64,
    selectors_u: Vec<usize>,
    selectors_v: Vec<usize>,
    weights: Option<(C64, C64)>,
    seed_grid: Option<&str>,
) -> PyResult<PyReport> {
    let input = match (word, matrix) {
        (Some(w), None) => WordInput::Word(parse_word(w)?),
        (None, Some(m)) => WordInput::Matrix(self::matrix(m)?),
        _ => {
            return Err(raise(PipelineError::new(
                Stage::Config,
                "MissingInput",
                "give exactly one of word or matrix",
            )))
        }
    };
    let mut cfg = RunConfig::new(parse_surface(surface)?, N, input);
    cfg.k = k;
    cfg.selectors = RootSelectors {
        u: selectors_u,
        v: selectors_v,
    };
    cfg.weights = weights;
    cfg.solver = solver_options(seed_grid)?;
    Ok(PyReport {
        inner: pipeline::run(&cfg).map_err(raise)?,
    })
}

/// Re-checks a stored JSON report; returns the outcome as a dict.
#[pyfunction]
fn verify<'py>(py: Python<'py>, report_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let report: InvariantReport = serde_json::from_str(report_json)
        .map_err(|e| raise(PipelineError::new(Stage::Verify, "MalformedReport", e)))?;
    let outcome = pipeline::verify_report(&report).map_err(raise)?;
    json_to_py(py, &serde_json::to_string(&outcome).expect("finite values"))
}

/// CSV table over words × N × k.
#[pyfunction]
#[pyo3(signature = (words, ns, *, surface = "torus", ks = vec![1], selector_sweep = false, seed_grid = None))]
fn tabulate(
    words: Vec<String>,
    ns: Vec<usize>,
    surface: &str,
    ks: Vec<i64>,
    selector_sweep: bool,
    seed_grid: Option<&str>,
) -> PyResult<String> {
    let mut spec = SweepSpec::new(parse_surface(surface)?, words, ns);
    spec.ks = ks;
    spec.selector_sweep = selector_sweep;
    spec.solver = solver_options(seed_grid)?;
    pipeline::tabulate(&spec).map_err(at(Stage::Config))
}

#[pymodule]
fn qhi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QhiError", m.py().get_type::<QhiError>())?;
    m.add("SCHEMA", qhi_core::report::SCHEMA)?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(word_to_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(solve_periodic, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(tabulate, m)?)?;
    Ok(())
}
