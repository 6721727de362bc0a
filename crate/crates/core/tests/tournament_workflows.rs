use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tariffcast::tournament::{ApproachStatus, REGISTRY};
use tariffcast::{
    compare_windows, run_approach, run_tournament, validate_holdout, ApproachId, Error, MonthRange, TimeSeries,
    TournamentConfig, YearMonth,
};

fn ym(year: i32, month: u8) -> YearMonth {
    YearMonth::new(year, month).unwrap()
}

fn id(n: u8) -> ApproachId {
    ApproachId::new(n).unwrap()
}

fn noise(seed: u64, n: usize, sd: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

fn seasonal_trend(n: usize) -> Vec<f64> {
    (0..n)
        .map(|t| (0.2 + 0.001 * t as f64) * (1.0 + 0.05 * (std::f64::consts::TAU * (t % 12) as f64 / 12.0).sin()))
        .collect()
}

#[test]
fn short_series_makes_annual_decomposition_infeasible() {
    let s = TimeSeries::new(ym(2011, 1), seasonal_trend(20)).unwrap();
    let err = run_approach(id(1), &s, 12, &TournamentConfig::default()).unwrap_err();
    assert!(matches!(err, Error::ApproachInfeasible { id: 1, .. }), "{err}");

    let report = run_tournament(&s, &TournamentConfig::default()).unwrap();
    let outcome = report.outcome(id(1));
    assert!(matches!(outcome.status, ApproachStatus::Infeasible { .. }));
    assert!(outcome.errors.is_none());
    // Infeasible rows sort after every fitted row.
    let first_infeasible = report.ranking.iter().position(|a| report.outcome(*a).errors.is_none()).unwrap();
    assert!(report.ranking[first_infeasible..].iter().all(|a| report.outcome(*a).errors.is_none()));
}

#[test]
fn arima_row_on_random_walk_repeats_last_value() {
    let walk: Vec<f64> = noise(2, 96, 0.01).iter().scan(0.3, |acc, e| {
        *acc += e;
        Some(*acc)
    }).collect();
    let last = *walk.last().unwrap();
    let s = TimeSeries::new(ym(2011, 1), walk).unwrap();
    let result = run_approach(id(19), &s, 12, &TournamentConfig::default()).unwrap();
    assert!(result.forecasts.iter().all(|f| *f == last));
}

#[test]
fn seasonal_data_is_never_won_by_single_smoothing() {
    let s = TimeSeries::new(ym(2011, 1), seasonal_trend(72)).unwrap();
    let report = run_tournament(&s, &TournamentConfig::default()).unwrap();
    assert_eq!(report.ranking.len(), 19);
    assert!(![11, 12].contains(&report.winner.get()), "winner {}", report.winner);
    assert!(matches!(
        REGISTRY[usize::from(report.winner.get()) - 1].method,
        tariffcast::tournament::Method::Decomposition { period: 12, .. }
            | tariffcast::tournament::Method::Regression { period: 12 }
            | tariffcast::tournament::Method::HoltWinters { period: 12, .. }
            | tariffcast::tournament::Method::Arima
    ));
    let best = report.outcome(report.winner).errors.unwrap();
    for outcome in &report.approaches {
        if let Some(e) = outcome.errors {
            assert!(best.mape <= e.mape);
        }
    }
}

#[test]
fn perfect_forecasts_have_zero_errors() {
    // A noiseless line is reproduced exactly by the regression row.
    let values: Vec<f64> = (0..60).map(|t| 0.2 + 0.002 * t as f64).collect();
    let s = TimeSeries::new(ym(2011, 1), values).unwrap();
    let report = validate_holdout(&s, ym(2014, 12), id(9), &TournamentConfig::default()).unwrap();
    assert_eq!(report.rows.len(), 12);
    assert!(report.rows.iter().all(|r| r.approx_error_pct.abs() < 1e-9));
}

#[test]
fn matching_model_validates_closely() {
    let s = TimeSeries::new(ym(2007, 1), seasonal_trend(108)).unwrap();
    let report = validate_holdout(&s, ym(2014, 12), id(17), &TournamentConfig::default()).unwrap();
    assert_eq!(report.holdout, "2015-01:2015-12".parse::<MonthRange>().unwrap());
    assert!(report.errors.mape < 0.5, "{}", report.errors.mape);
}

#[test]
fn holdout_values_never_reach_the_fit() {
    let values = seasonal_trend(60);
    let mut poisoned = values.clone();
    for v in &mut poisoned[48..] {
        *v *= 3.0;
    }
    let config = TournamentConfig::default();
    for approach in [1, 9, 14, 17, 19] {
        let a = validate_holdout(&TimeSeries::new(ym(2011, 1), values.clone()).unwrap(), ym(2014, 12), id(approach), &config)
            .unwrap();
        let b = validate_holdout(&TimeSeries::new(ym(2011, 1), poisoned.clone()).unwrap(), ym(2014, 12), id(approach), &config)
            .unwrap();
        let fa: Vec<f64> = a.rows.iter().map(|r| r.forecast).collect();
        let fb: Vec<f64> = b.rows.iter().map(|r| r.forecast).collect();
        assert_eq!(fa, fb, "approach {approach}");
    }
}

#[test]
fn short_holdout_is_rejected() {
    let s = TimeSeries::new(ym(2011, 1), seasonal_trend(58)).unwrap();
    let err = validate_holdout(&s, ym(2014, 12), id(17), &TournamentConfig::default()).unwrap_err();
    assert_eq!(err, Error::HoldoutTooShort { needed: 12, got: 10 });
}

#[test]
fn identical_windows_give_identical_reports() {
    let s = TimeSeries::new(ym(2007, 1), seasonal_trend(108)).unwrap();
    let w: MonthRange = "2011-01:2014-12".parse().unwrap();
    let h: MonthRange = "2015-01:2015-12".parse().unwrap();
    let cmp = compare_windows(&s, w, w, h, &TournamentConfig::default()).unwrap();
    assert_eq!(
        serde_json::to_string(&cmp.window_a).unwrap(),
        serde_json::to_string(&cmp.window_b).unwrap()
    );
}

#[test]
fn longer_window_does_not_hurt_on_stationary_seasonal_data() {
    let e = noise(31, 108, 0.003);
    let values: Vec<f64> = (0..108)
        .map(|t| 0.3 * (1.0 + 0.05 * (std::f64::consts::TAU * (t % 12) as f64 / 12.0).cos()) + e[t])
        .collect();
    let s = TimeSeries::new(ym(2007, 1), values).unwrap();
    let a: MonthRange = "2011-01:2014-12".parse().unwrap();
    let b: MonthRange = "2007-01:2014-12".parse().unwrap();
    let h: MonthRange = "2015-01:2015-12".parse().unwrap();
    let cmp = compare_windows(&s, a, b, h, &TournamentConfig::default()).unwrap();
    let mape_a = cmp.window_a.validation.errors.mape;
    let mape_b = cmp.window_b.validation.errors.mape;
    assert!(mape_b <= mape_a + 0.5, "window a {mape_a}, window b {mape_b}");
    assert_eq!(cmp.window_a.validation.rows.len(), 12);
}

#[test]
fn misaligned_windows_are_rejected() {
    let s = TimeSeries::new(ym(2007, 1), seasonal_trend(108)).unwrap();
    let a: MonthRange = "2011-01:2014-12".parse().unwrap();
    let b: MonthRange = "2007-01:2014-11".parse().unwrap();
    let h: MonthRange = "2015-01:2015-12".parse().unwrap();
    let config = TournamentConfig::default();
    assert!(matches!(compare_windows(&s, a, b, h, &config), Err(Error::InvalidWindow(_))));
    let late: MonthRange = "2015-02:2015-12".parse().unwrap();
    assert!(matches!(compare_windows(&s, a, a, late, &config), Err(Error::InvalidWindow(_))));
}

#[test]
fn reports_serialize_status_inline() {
    let s = TimeSeries::new(ym(2011, 1), seasonal_trend(20)).unwrap();
    let report = run_tournament(&s, &TournamentConfig::default()).unwrap();
    let json: serde_json::Value = serde_json::to_value(&report).unwrap();
    let first = &json["approaches"][0];
    assert_eq!(first["id"], 1);
    assert_eq!(first["status"], "infeasible");
    assert!(first["reason"].as_str().unwrap().contains("too short"));
    assert_eq!(json["config"]["metric_priority"][0], "mape");
}
