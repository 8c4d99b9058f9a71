use wicksell_core::verify::{
    predict_beta, render_report, run_corollary_check, run_scenario, run_theorem1_matrix, Quantity, Scenario,
    VerificationReport, VerifyConfig, DEFAULT_ALPHAS, DEFAULT_ETAS,
};
use wicksell_core::{EvtClass, WicksellError};

#[test]
fn prediction_cases() {
    let w = |alpha| EvtClass::Weibull { alpha };
    let table: [(EvtClass, f64, u32, f64); 8] = [
        (w(0.5), 0.0, 1, 1.5),
        (w(0.9), 0.0, 1, 1.9),
        (w(1.0), 0.0, 1, 2.0),
        (w(2.5), 0.0, 1, 2.0),
        (w(0.5), 0.5, 1, 2.0),
        (w(0.5), 0.0, 3, 2.0),
        (EvtClass::Gumbel, 0.0, 1, 2.0),
        (EvtClass::Degenerate, 0.0, 1, 2.0),
    ];
    for (class, eta, r, want) in table {
        assert_eq!(predict_beta(&class, eta, r).unwrap(), want, "{class} η={eta} r={r}");
    }
    assert!(matches!(predict_beta(&EvtClass::Frechet { alpha: 2.0 }, 0.0, 1), Err(WicksellError::Unsupported(_))));
}

#[test]
fn default_suite_passes() {
    let config = VerifyConfig::with_seed(42);
    let report = run_scenario(Scenario::All, &DEFAULT_ALPHAS, &DEFAULT_ETAS, &config);
    assert_eq!(report.rows.len(), 8 + 4 + 6);
    for row in &report.rows {
        assert!(row.pass, "{row:?}");
        assert_eq!(row.pass, row.recompute_pass());
    }
    let boundary: Vec<_> = report.rows.iter().filter(|r| r.boundary).collect();
    assert_eq!(boundary.len(), 1);
    assert_eq!(boundary[0].law, "uniform");
    let cell = report.rows.iter().find(|r| r.law == "power --alpha 0.5" && r.r == 1).unwrap();
    assert!((1.40..=1.60).contains(&cell.estimate.unwrap()));
    assert_eq!(cell.tolerance, 0.10);

    let json = render_report(&report, "json").unwrap();
    assert_eq!(serde_json::from_str::<VerificationReport>(&json).unwrap(), report);
    let md = render_report(&report, "markdown").unwrap();
    assert_eq!(md.lines().count(), report.rows.len() + 2);
    let csv = render_report(&report, "csv").unwrap();
    assert_eq!(csv.lines().count(), report.rows.len() + 1);
}

#[test]
fn failures_become_rows() {
    let report = run_theorem1_matrix(&[-1.0, 0.5], &[0.0], &VerifyConfig::default());
    assert_eq!(report.rows.len(), 2);
    assert!(!report.rows[0].pass && report.rows[0].error.is_some());
    assert!(report.rows[1].pass);
    assert!(!report.all_pass());
}

#[test]
fn corollary_routes_codimension_one_to_the_first_case() {
    let report = run_corollary_check(&[1], &VerifyConfig::default());
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].quantity, Quantity::Beta);
    assert_eq!(report.rows[0].predicted, Some(1.5));
    assert!(report.rows[0].pass);
}

#[test]
fn reports_identical_across_thread_counts() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let r = run_scenario(Scenario::Theorem2, &DEFAULT_ALPHAS, &DEFAULT_ETAS, &VerifyConfig::with_seed(7));
            render_report(&r, "json").unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn metadata_and_empty_reports() {
    let mut config = VerifyConfig::with_seed(9);
    let empty = VerificationReport::empty(&config);
    assert!(!render_report(&empty, "json").unwrap().contains("timestamp"));
    config.timestamp = Some("2026-01-01T00:00:00Z".into());
    let stamped = VerificationReport::empty(&config);
    assert!(render_report(&stamped, "json").unwrap().contains("2026-01-01T00:00:00Z"));
    assert_eq!(render_report(&empty, "csv").unwrap().trim(), "scenario,law,eta,r,quantity,predicted,estimate,method,tolerance,pass,boundary,error");
    assert!("nonsense".parse::<Scenario>().is_err());
}
