//! End-to-end runs: word or matrix → periodic weights → roots → `C_φ` → report.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::invariant::{self, SurfaceParams};
use crate::linalg::{self, C64};
use crate::report::{
    complexes, matrix_to_json, pairs, CentralsJson, InvariantReport, Residuals, RootsJson,
    Thresholds, SCHEMA,
};
use crate::roots::{choose_roots, RootChoice, RootSelectors};
use crate::shear::{
    self, select_geometric, solve_periodic, PeriodicSolution, ShearError, ShearWeights,
    SolverOptions, SurfaceKind,
};
use crate::spectrum;
use crate::weyl::{RootOfUnity, SphereCentrals};
use crate::word::{decompose_with_sign, IntMatrix2x2, MappingClassWord};

pub const FLAG_NEGATIVE_TRACE: &str = "negative-trace: composed with elliptic involution";
pub const FLAG_HEURISTIC_SELECTION: &str = "geometric-selection-heuristic";
pub const FLAG_NON_ISOLATED: &str = "non-isolated-solution";
pub const FLAG_MANUAL_WEIGHTS: &str = "manual-weights";
pub const FLAG_REAL_WEIGHTS: &str = "real-weights: no nonreal periodic solution, first by sort key";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Stage {
    Config,
    Word,
    Solve,
    Select,
    Evolve,
    Roots,
    Assemble,
    Spectrum,
    Verify,
}

/// Structured failure: which stage broke and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: String,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, kind: &str, message: impl fmt::Display) -> Self {
        Self {
            stage,
            kind: kind.to_string(),
            message: message.to_string(),
        }
    }

    /// Wraps any error, taking `kind` from its variant name.
    pub fn at<E: fmt::Debug + fmt::Display>(stage: Stage, e: &E) -> Self {
        Self::new(stage, &kind_of(e), e)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({ "error": self })).expect("plain strings")
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} stage failed ({}): {}",
            self.stage, self.kind, self.message
        )
    }
}

impl std::error::Error for PipelineError {}

/// Short variant name of an error enum, from its `Debug` form.
fn kind_of(e: &impl fmt::Debug) -> String {
    let text = format!("{e:?}");
    text.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn fail<E: fmt::Debug + fmt::Display>(stage: Stage) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError::new(stage, &kind_of(&e), &e)
}

#[derive(Debug, Clone, PartialEq)]
pub enum WordInput {
    Word(MappingClassWord),
    Matrix(IntMatrix2x2),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub surface: SurfaceKind,
    pub n: usize,
    pub k: i64,
    pub input: WordInput,
    pub selectors: RootSelectors,
    /// Manual `(x1, x2)` override of the solver.
    pub weights: Option<(C64, C64)>,
    pub solver: SolverOptions,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn new(surface: SurfaceKind, n: usize, input: WordInput) -> Self {
        Self {
            surface,
            n,
            k: 1,
            input,
            selectors: RootSelectors::uniform(),
            weights: None,
            solver: SolverOptions::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn for_word(surface: SurfaceKind, n: usize, word: &str) -> Result<Self, PipelineError> {
        let word = word.parse().map_err(fail(Stage::Word))?;
        Ok(Self::new(surface, n, WordInput::Word(word)))
    }
}

/// The central data used for each surface: `h = 1` on the torus;
/// `h = 1, p_j = −1` on the sphere.
pub fn default_params(surface: SurfaceKind) -> SurfaceParams {
    match surface {
        SurfaceKind::Torus1 => SurfaceParams::Torus {
            h: C64::new(1.0, 0.0),
        },
        SurfaceKind::Sphere4 => SurfaceParams::Sphere {
            centrals: SphereCentrals::geometric(),
        },
    }
}

fn validate(config: &RunConfig) -> Result<RootOfUnity, PipelineError> {
    let root = RootOfUnity::new(config.n, config.k).map_err(fail(Stage::Config))?;
    config
        .thresholds
        .validate()
        .map_err(|m| PipelineError::new(Stage::Config, "InvalidTolerance", m))?;
    let s = &config.solver;
    if !(s.newton_tolerance > 0.0 && s.dedup_radius > 0.0) {
        return Err(PipelineError::new(
            Stage::Config,
            "InvalidTolerance",
            "solver tolerances must be positive",
        ));
    }
    Ok(root)
}

/// The word to use, and whether the input matrix had trace < −2.
pub fn resolve_word(
    input: &WordInput,
) -> Result<(MappingClassWord, bool, Option<IntMatrix2x2>), PipelineError> {
    match input {
        WordInput::Word(w) => {
            w.to_matrix().map_err(fail(Stage::Word))?;
            Ok((w.clone(), false, None))
        }
        WordInput::Matrix(m) => {
            let (w, negated) = decompose_with_sign(m).map_err(fail(Stage::Word))?;
            Ok((w, negated, Some(*m)))
        }
    }
}

/// Periodic weights for a word, plus the flags and solution count to report.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsOutcome {
    pub start: ShearWeights,
    pub flags: Vec<String>,
    pub solutions_found: Option<usize>,
}

pub fn find_weights(
    word: &MappingClassWord,
    surface: SurfaceKind,
    manual: Option<(C64, C64)>,
    solver: &SolverOptions,
) -> Result<WeightsOutcome, PipelineError> {
    let h_n = C64::new(1.0, 0.0);
    if let Some((x1, x2)) = manual {
        return Ok(WeightsOutcome {
            start: ShearWeights::new(x1, x2, h_n),
            flags: vec![FLAG_MANUAL_WEIGHTS.to_string()],
            solutions_found: None,
        });
    }
    let solutions = solve_periodic(word, surface, h_n, solver).map_err(fail(Stage::Solve))?;
    let (chosen, mut flags): (PeriodicSolution, Vec<String>) = match select_geometric(&solutions) {
        Ok(s) => (s, vec![FLAG_HEURISTIC_SELECTION.to_string()]),
        // The sign-twisted sphere system only has real periodic points.
        Err(ShearError::NoGeometricCandidate) if surface == SurfaceKind::Sphere4 => {
            (solutions[0], vec![FLAG_REAL_WEIGHTS.to_string()])
        }
        Err(e) => return Err(fail(Stage::Select)(e)),
    };
    if !chosen.isolated {
        flags.push(FLAG_NON_ISOLATED.to_string());
    }
    Ok(WeightsOutcome {
        start: chosen.weights,
        flags,
        solutions_found: Some(solutions.len()),
    })
}

fn centrals_json(params: &SurfaceParams) -> Option<CentralsJson> {
    match params {
        SurfaceParams::Torus { .. } => None,
        SurfaceParams::Sphere { centrals } => Some(CentralsJson {
            h: centrals.h.into(),
            p: [
                centrals.p[0].into(),
                centrals.p[1].into(),
                centrals.p[2].into(),
                centrals.p[3].into(),
            ],
        }),
    }
}

/// Builds the report from already-found weights.
pub fn run_with_weights(
    config: &RunConfig,
    word: &MappingClassWord,
    negative_trace: bool,
    input_matrix: Option<IntMatrix2x2>,
    weights: &WeightsOutcome,
) -> Result<InvariantReport, PipelineError> {
    let root = validate(config)?;
    let params = default_params(config.surface);
    let trajectory =
        shear::evolve(word, weights.start, config.surface).map_err(fail(Stage::Evolve))?;
    let roots = choose_roots(&trajectory, &root, params.h(), &config.selectors)
        .map_err(fail(Stage::Roots))?;
    let assembly = invariant::assemble(word.letters(), &root, &roots, &params)
        .map_err(fail(Stage::Assemble))?;
    let cyclic = invariant::cyclic_check(word.letters(), &root, &roots, &params, &assembly.c)
        .map_err(fail(Stage::Spectrum))?;
    let spec = spectrum::projective_invariants(&assembly.c).map_err(fail(Stage::Spectrum))?;

    let residuals = Residuals {
        relations: assembly.relations,
        per_step: assembly.per_step.clone(),
        full_word: assembly.full_word,
        cyclic_check: cyclic,
    };
    let failures = config.thresholds.failures(&residuals);
    let mut flags = weights.flags.clone();
    if negative_trace {
        flags.insert(0, FLAG_NEGATIVE_TRACE.to_string());
    }
    Ok(InvariantReport {
        schema: SCHEMA.to_string(),
        surface: config.surface,
        word: word.to_string(),
        n: root.n(),
        k: root.k(),
        input_matrix,
        negative_trace,
        flags,
        weights: trajectory,
        centrals: centrals_json(&params),
        roots: roots_json(&roots),
        c: matrix_to_json(&assembly.c),
        spectrum_ratios: pairs(&spec.ratios),
        char_poly: pairs(&spec.char_poly),
        condition_number: assembly.condition,
        residuals,
        thresholds: config.thresholds,
        solutions_found: weights.solutions_found,
        passed: failures.is_empty(),
        failures,
    })
}

fn roots_json(roots: &RootChoice) -> RootsJson {
    RootsJson {
        u: pairs(&roots.u),
        v: pairs(&roots.v),
        h: roots.h.into(),
        selectors: roots.selectors.clone(),
    }
}

/// Full pipeline. `Ok` reports may still have `passed == false`.
pub fn run(config: &RunConfig) -> Result<InvariantReport, PipelineError> {
    validate(config)?;
    let (word, negated, matrix) = resolve_word(&config.input)?;
    let weights = find_weights(&word, config.surface, config.weights, &config.solver)?;
    run_with_weights(config, &word, negated, matrix, &weights)
}

/// Result of re-checking a stored report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyOutcome {
    pub passed: bool,
    /// Relative difference between the stored and recomputed `C`.
    pub matrix_difference: f64,
    /// Mismatch between stored roots and stored weights.
    pub root_power_residual: f64,
    /// Mismatch between stored weights and their re-evolved trajectory.
    pub trajectory_residual: f64,
    pub residuals: Residuals,
    pub failures: Vec<String>,
}

const VERIFY_MATRIX_TOLERANCE: f64 = 1e-12;
const VERIFY_POWER_TOLERANCE: f64 = 1e-10;

/// Recomputes `C` and all residuals from the roots stored in `report`.
pub fn verify_report(report: &InvariantReport) -> Result<VerifyOutcome, PipelineError> {
    if report.schema != SCHEMA {
        return Err(PipelineError::new(
            Stage::Verify,
            "SchemaMismatch",
            format!("unknown schema {:?}", report.schema),
        ));
    }
    let root = RootOfUnity::new(report.n, report.k).map_err(fail(Stage::Config))?;
    let word: MappingClassWord = report.word.parse().map_err(fail(Stage::Word))?;
    let params = match (&report.surface, &report.centrals) {
        (SurfaceKind::Torus1, _) => SurfaceParams::Torus {
            h: report.roots.h.into(),
        },
        (SurfaceKind::Sphere4, Some(c)) => SurfaceParams::Sphere {
            centrals: SphereCentrals::new(
                c.h.into(),
                [c.p[0].into(), c.p[1].into(), c.p[2].into(), c.p[3].into()],
            )
            .map_err(fail(Stage::Verify))?,
        },
        (SurfaceKind::Sphere4, None) => {
            return Err(PipelineError::new(
                Stage::Verify,
                "MissingCentrals",
                "sphere report has no central values",
            ))
        }
    };
    let roots = RootChoice {
        u: complexes(&report.roots.u),
        v: complexes(&report.roots.v),
        h: report.roots.h.into(),
        selectors: report.roots.selectors.clone(),
    };
    if roots.u.len() != word.len() + 1
        || roots.v.len() != word.len() + 1
        || report.weights.len() != word.len() + 1
    {
        return Err(PipelineError::new(
            Stage::Verify,
            "LengthMismatch",
            "roots or weights do not match the word length",
        ));
    }
    let root_power_residual = roots.power_residual(&report.weights, root.n());
    let trajectory =
        shear::evolve(&word, report.weights[0], report.surface).map_err(fail(Stage::Evolve))?;
    let trajectory_residual = trajectory
        .iter()
        .zip(&report.weights)
        .map(|(a, b)| a.distance(b) / b.x1.norm().max(b.x2.norm()).max(1.0))
        .fold(0.0, f64::max);

    let assembly = invariant::assemble(word.letters(), &root, &roots, &params)
        .map_err(fail(Stage::Assemble))?;
    let cyclic = invariant::cyclic_check(word.letters(), &root, &roots, &params, &assembly.c)
        .map_err(fail(Stage::Spectrum))?;
    let stored = report
        .matrix()
        .ok_or_else(|| PipelineError::new(Stage::Verify, "MalformedMatrix", "C is not square"))?;
    let matrix_difference = if stored.nrows() == assembly.c.nrows() {
        linalg::relative_difference(&stored, &assembly.c)
    } else {
        f64::INFINITY
    };
    let residuals = Residuals {
        relations: assembly.relations,
        per_step: assembly.per_step,
        full_word: assembly.full_word,
        cyclic_check: cyclic,
    };
    let mut failures = report.thresholds.failures(&residuals);
    if !(matrix_difference <= VERIFY_MATRIX_TOLERANCE) {
        failures.push(format!(
            "stored C differs from recomputed C by {matrix_difference:e}"
        ));
    }
    if !(root_power_residual <= VERIFY_POWER_TOLERANCE) {
        failures.push(format!(
            "stored roots do not match stored weights ({root_power_residual:e})"
        ));
    }
    if !(trajectory_residual <= VERIFY_POWER_TOLERANCE) {
        failures.push(format!(
            "stored weights are not a trajectory of the word ({trajectory_residual:e})"
        ));
    }
    Ok(VerifyOutcome {
        passed: failures.is_empty(),
        matrix_difference,
        root_power_residual,
        trajectory_residual,
        residuals,
        failures,
    })
}

/// A sweep over words × N × k × (optionally) the initial root selectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub surface: SurfaceKind,
    pub words: Vec<String>,
    pub ns: Vec<usize>,
    pub ks: Vec<i64>,
    /// Sweep `(u₀, v₀)` selectors over `{0..N−1}²`.
    pub selector_sweep: bool,
    pub solver: SolverOptions,
    pub thresholds: Thresholds,
}

impl SweepSpec {
    pub fn new(surface: SurfaceKind, words: Vec<String>, ns: Vec<usize>) -> Self {
        Self {
            surface,
            words,
            ns,
            ks: vec![1],
            selector_sweep: false,
            solver: SolverOptions::default(),
            thresholds: Thresholds::default(),
        }
    }
}

pub const CSV_HEADER: [&str; 16] = [
    "schema",
    "surface",
    "word",
    "N",
    "k",
    "selectorU",
    "selectorV",
    "passed",
    "relations",
    "perStepMax",
    "fullWord",
    "cyclicCheck",
    "conditionNumber",
    "spectrumRatios",
    "charPoly",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub word: String,
    pub n: usize,
    pub k: i64,
    pub selector_u: usize,
    pub selector_v: usize,
    pub outcome: Result<InvariantReport, PipelineError>,
}

impl SweepRow {
    fn record(&self, surface: SurfaceKind) -> Vec<String> {
        let mut out = vec![
            SCHEMA.to_string(),
            surface.name().to_string(),
            self.word.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.selector_u.to_string(),
            self.selector_v.to_string(),
        ];
        match &self.outcome {
            Ok(r) => {
                // Shortest round-trip form, as in the JSON reports.
                let float = |x: f64| serde_json::to_string(&x).expect("finite");
                out.push(r.passed.to_string());
                out.push(float(r.residuals.relations));
                out.push(float(r.residuals.per_step_max()));
                out.push(float(r.residuals.full_word));
                out.push(float(r.residuals.cyclic_check));
                out.push(float(r.condition_number));
                out.push(serde_json::to_string(&r.spectrum_ratios).expect("finite"));
                out.push(serde_json::to_string(&r.char_poly).expect("finite"));
                out.push(String::new());
            }
            Err(e) => {
                out.push("false".into());
                out.extend(std::iter::repeat_n(String::new(), 7));
                out.push(e.to_string());
            }
        }
        out
    }
}

/// Runs every row of the sweep (in parallel) and returns them in key order.
/// Weights are solved once per word.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let per_word: Vec<_> = spec
        .words
        .par_iter()
        .map(|w| {
            let prepared = RunConfig::for_word(spec.surface, 1, w)
                .and_then(|cfg| resolve_word(&cfg.input))
                .and_then(|(word, neg, m)| {
                    let weights = find_weights(&word, spec.surface, None, &spec.solver)?;
                    Ok((word, neg, m, weights))
                });
            (w.clone(), prepared)
        })
        .collect();

    let mut jobs = Vec::new();
    for (w, prepared) in &per_word {
        for &n in &spec.ns {
            for &k in &spec.ks {
                let selectors: Vec<(usize, usize)> = if spec.selector_sweep {
                    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
                } else {
                    vec![(0, 0)]
                };
                for (su, sv) in selectors {
                    jobs.push((w, prepared, n, k, su, sv));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(w, prepared, n, k, su, sv)| {
            let outcome = prepared.clone().and_then(|(word, neg, m, weights)| {
                let mut cfg = RunConfig::new(spec.surface, n, WordInput::Word(word.clone()));
                cfg.k = k;
                cfg.selectors = RootSelectors::initial(su, sv);
                cfg.solver = spec.solver;
                cfg.thresholds = spec.thresholds;
                run_with_weights(&cfg, &word, neg, m, &weights)
            });
            SweepRow {
                word: w.clone(),
                n,
                k,
                selector_u: su,
                selector_v: sv,
                outcome,
            }
        })
        .collect()
}

/// CSV summary of a sweep; the header is always written.
pub fn tabulate(spec: &SweepSpec) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for row in sweep(spec) {
        writer.write_record(row.record(spec.surface))?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
