use core_qkd_harness::config::parse;
use core_qkd_harness::report::{parse_csv, render_report, Format};
use core_qkd_harness::run_experiment;

#[test]
fn single_trial_is_reproducible() {
    let text = "[experiment]\nname = once\ntrials = 1\nseed = 3\n\n[session]\nn_blocks = 50\neve = guess_core\n";
    let spec = parse(text).unwrap();
    let a = run_experiment(&spec).unwrap();
    let b = run_experiment(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].error_rate_se, None);
}

#[test]
fn paper_table_reproduces_the_three_claims() {
    let spec = parse(core_qkd_harness::builtin("paper-table").unwrap()).unwrap();
    let rows = run_experiment(&spec).unwrap();
    let by_eve = |e: &str| rows.iter().find(|r| r.eve == e).unwrap();

    let none = by_eve("none");
    assert_eq!(none.error_rate, Some(0.0));
    assert_eq!(none.acceptance_rate, Some(1.0));

    let guess = by_eve("guess_core");
    assert!((guess.error_rate.unwrap() - 0.5625).abs() < 0.01);
    assert!((guess.wrong_guess_error_rate.unwrap() - 0.75).abs() < 0.01);
    assert_eq!(guess.acceptance_rate, Some(0.0));
    assert_eq!(guess.key_bits, Some(0.0));

    let probe = by_eve("bell_probe");
    let (m, se) = (probe.probe_mean.unwrap(), probe.probe_mean_se.unwrap());
    assert!(m.abs() < 0.02 && m.abs() < 5.0 * se.max(1e-3), "{m} ± {se}");

    let csv = render_report(&rows, Format::Csv).unwrap();
    assert_eq!(parse_csv(csv.as_bytes()).unwrap(), rows);
}

#[test]
fn bootstrap_sift_rate_tightens_with_length() {
    let spec = parse(core_qkd_harness::builtin("bootstrap-sift").unwrap()).unwrap();
    let rows = run_experiment(&spec).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        // Binomial oracle: per-trial sd is sqrt(p(1-p)/n_blocks).
        let sd = (0.25f64 * 0.75 / r.n_blocks as f64).sqrt();
        let se_oracle = sd / (r.trials as f64).sqrt();
        let mean = r.sift_rate.unwrap();
        assert!(
            (mean - 0.25).abs() < 4.0 * se_oracle,
            "{mean} vs ±{se_oracle}"
        );
        let se = r.sift_rate_se.unwrap();
        assert!(
            se > 0.3 * se_oracle && se < 3.0 * se_oracle,
            "{se} vs {se_oracle}"
        );
    }
    assert!(rows[1].sift_rate_se.unwrap() < rows[0].sift_rate_se.unwrap());
}

#[test]
fn noise_sweep_is_monotone() {
    let text = "[experiment]\ntrials = 2\nseed = 1\n[session]\nn_blocks = 500\nerror_threshold = 1\n[sweep]\nnoise = 0, 0.1, 0.3, 1\n";
    let rows = run_experiment(&parse(text).unwrap()).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.error_rate.unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[0] <= w[1]), "{errs:?}");
    assert!((errs[3] - 0.75).abs() < 0.03);
}
