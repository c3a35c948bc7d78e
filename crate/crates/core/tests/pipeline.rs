use qhi_core::linalg::C64;
use qhi_core::pipeline::{
    run, sweep, tabulate, verify_report, RunConfig, SweepSpec, WordInput, FLAG_NEGATIVE_TRACE,
};
use qhi_core::report::{complexes, InvariantReport, SCHEMA};
use qhi_core::shear::{solve_periodic, SolverOptions, SurfaceKind};
use qhi_core::spectrum::projective_distance;
use qhi_core::word::IntMatrix2x2;

fn report(surface: SurfaceKind, n: usize, word: &str) -> InvariantReport {
    run(&RunConfig::for_word(surface, n, word).unwrap()).unwrap()
}

fn ratios(r: &InvariantReport) -> Vec<C64> {
    complexes(&r.spectrum_ratios)
}

#[test]
fn rl_and_lr_have_the_same_projective_spectrum() {
    for surface in [SurfaceKind::Torus1, SurfaceKind::Sphere4] {
        let rl = report(surface, 3, "RL");
        let lr = report(surface, 3, "LR");
        assert!(
            rl.passed && lr.passed,
            "{:?} {:?}",
            rl.failures,
            lr.failures
        );
        let d = projective_distance(&ratios(&rl), &ratios(&lr));
        assert!(d < 1e-6, "{surface:?}: {d}");
    }
}

#[test]
fn matrix_input_matches_word_input() {
    let by_word = report(SurfaceKind::Torus1, 5, "RL");
    let m = IntMatrix2x2::new(2, 1, 1, 1).unwrap();
    let by_matrix = run(&RunConfig::new(
        SurfaceKind::Torus1,
        5,
        WordInput::Matrix(m),
    ))
    .unwrap();
    assert_eq!(by_matrix.word, "RL");
    assert_eq!(by_matrix.input_matrix, Some(m));
    assert!(projective_distance(&ratios(&by_word), &ratios(&by_matrix)) < 1e-6);
}

#[test]
fn negative_trace_is_flagged() {
    let m = IntMatrix2x2::new(-2, -1, -1, -1).unwrap();
    let r = run(&RunConfig::new(
        SurfaceKind::Torus1,
        3,
        WordInput::Matrix(m),
    ))
    .unwrap();
    assert!(r.negative_trace);
    assert_eq!(r.flags[0], FLAG_NEGATIVE_TRACE);
    assert_eq!(r.word, "RL");
}

#[test]
fn sphere_rrll_at_five_passes() {
    let r = report(SurfaceKind::Sphere4, 5, "RRLL");
    assert!(r.passed, "{:?}", r.failures);
    assert!(r.centrals.is_some());
}

#[test]
fn verify_round_trip() {
    for surface in [SurfaceKind::Torus1, SurfaceKind::Sphere4] {
        let r = report(surface, 3, "RRL");
        let parsed: InvariantReport = serde_json::from_str(&r.to_json()).unwrap();
        let outcome = verify_report(&parsed).unwrap();
        assert!(outcome.passed, "{:?}", outcome.failures);
        assert!(outcome.matrix_difference < 1e-12);
    }
}

#[test]
fn verify_detects_tampering() {
    let mut r = report(SurfaceKind::Torus1, 3, "RL");
    r.c[0][1].0 += 0.5;
    let outcome = verify_report(&r).unwrap();
    assert!(!outcome.passed);
    assert!(outcome.failures.iter().any(|f| f.contains("stored C")));

    let mut r = report(SurfaceKind::Torus1, 3, "RL");
    r.schema = "qhi/0".into();
    assert_eq!(verify_report(&r).unwrap_err().kind, "SchemaMismatch");
}

#[test]
fn reports_are_byte_identical() {
    let a = report(SurfaceKind::Torus1, 5, "RRL").to_json();
    let b = report(SurfaceKind::Torus1, 5, "RRL").to_json();
    assert_eq!(a, b);
    assert!(a.contains(&format!("\"schema\": \"{SCHEMA}\"")));
}

#[test]
fn solution_sets_are_closed_under_conjugation() {
    let word = "RRL".parse().unwrap();
    let sols = solve_periodic(
        &word,
        SurfaceKind::Torus1,
        C64::new(1.0, 0.0),
        &SolverOptions::default(),
    )
    .unwrap();
    for s in &sols {
        let bar = s.weights.conj();
        assert!(
            sols.iter().any(|t| t.weights.distance(&bar) < 1e-8),
            "{:?}",
            s.weights
        );
    }
}

#[test]
fn tabulate_over_n() {
    let spec = SweepSpec::new(SurfaceKind::Torus1, vec!["RL".into()], vec![3, 5, 7]);
    let csv = tabulate(&spec).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, n) in rows.iter().zip(["3", "5", "7"]) {
        assert_eq!(&row[3], n);
        assert_eq!(&row[7], "true");
        assert_eq!(&row[15], "");
    }
    assert_eq!(tabulate(&spec).unwrap(), csv);
}

#[test]
fn selector_sweep_has_nine_rows() {
    let mut spec = SweepSpec::new(SurfaceKind::Torus1, vec!["RL".into()], vec![3]);
    spec.selector_sweep = true;
    let rows = sweep(&spec);
    assert_eq!(rows.len(), 9);
    let keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.selector_u, r.selector_v)).collect();
    let expected: Vec<(usize, usize)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    assert_eq!(keys, expected);
    for row in &rows {
        let r = row.outcome.as_ref().unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let spec = SweepSpec::new(SurfaceKind::Torus1, vec![], vec![3]);
    let csv = tabulate(&spec).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("schema,surface,word,N,k,"));
}

#[test]
fn sweep_rows_keep_errors() {
    let spec = SweepSpec::new(SurfaceKind::Torus1, vec!["RR".into(), "RL".into()], vec![3]);
    let rows = sweep(&spec);
    assert_eq!(rows.len(), 2);
    assert_eq!(
        rows[0].outcome.as_ref().unwrap_err().kind,
        "NotPseudoAnosov"
    );
    assert!(rows[1].outcome.is_ok());
}
