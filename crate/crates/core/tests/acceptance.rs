//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tariffcast::arima::{candidate_orders, css_residuals, fit_arima, forecast_arima, select_arima_order, ArimaModel, ArimaOrder};
use tariffcast::decomposition::{seasonal_indices, Composition, IndexMethod};
use tariffcast::metrics::{mad, mape, mpe, msd, mse, rmse, PairedSeries};
use tariffcast::regression::{build_design_matrix, fit_least_squares, fit_regression, normalized_orthogonality};
use tariffcast::tournament::select_winner;
use tariffcast::{
    run_approach, run_tournament, validate_holdout, ApproachId, ErrorTriple, TimeSeries, TournamentConfig,
    ValidationReport, YearMonth,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s,
        format!("took {:.3}s, limit {limit_s}s", elapsed.as_secs_f64()),
    )
}

fn ym(year: i32, month: u8) -> YearMonth {
    YearMonth::new(year, month).unwrap()
}

fn id(n: u8) -> ApproachId {
    ApproachId::new(n).unwrap()
}

fn series(values: Vec<f64>) -> TimeSeries {
    TimeSeries::new(ym(2011, 1), values).unwrap()
}

fn noise(seed: u64, n: usize, sd: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

fn rel_close(got: f64, want: f64, scale: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(scale)
}

fn metric_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t0 = Instant::now();
    for case in 0..1000 {
        let n = rng.random_range(1..=20);
        let actual: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
        let predicted: Vec<f64> = actual.iter().map(|a| a + rng.random_range(-0.5..0.5)).collect();
        let pairs = PairedSeries::new(&actual, &predicted).unwrap();
        let nf = n as f64;

        let (mut abs, mut sq, mut pct, mut signed, mut abs_pct) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let e = actual[i] - predicted[i];
            abs += e.abs();
            sq += e * e;
            pct += (e / actual[i]).abs();
            signed += e / actual[i];
            abs_pct += (e / actual[i]).abs();
        }
        let want_mad = abs / nf;
        let want_mse = sq / nf;
        let want_mape = 100.0 * pct / nf;
        let want_mpe = 100.0 * signed / nf;
        // MPE can cancel towards zero; measure it against the mean absolute term.
        let mpe_scale = 100.0 * abs_pct / nf;

        let ok = rel_close(mad(&pairs), want_mad, 0.0, 1e-12)
            && rel_close(mse(&pairs), want_mse, 0.0, 1e-12)
            && rel_close(rmse(&pairs), want_mse.sqrt(), 0.0, 1e-12)
            && rel_close(mape(&pairs).unwrap(), want_mape, 0.0, 1e-12)
            && rel_close(mpe(&pairs).unwrap(), want_mpe, mpe_scale, 1e-12);
        check(ok, format!("case {case} disagrees with the brute-force oracle"))?;
        check(msd(&pairs).to_bits() == mse(&pairs).to_bits(), format!("case {case}: MSD differs from MSE"))?;
    }
    let elapsed = t0.elapsed();
    within(elapsed, 1.0)?;
    Ok(format!("1000 cases in {:.3}s", elapsed.as_secs_f64()))
}

fn triple(mape: f64, mad: f64, msd: f64) -> ErrorTriple {
    ErrorTriple { mape, mad, msd }
}

/// Registry rows behind the published best-three triples: Holt-Winters s=12 is
/// row 17, double smoothing s=12 row 14, regression s=12 row 9, ARIMA row 19.
fn inject(rows: &[(u8, ErrorTriple)]) -> ApproachId {
    let entries: Vec<(ApproachId, Option<ErrorTriple>)> = ApproachId::all()
        .map(|a| (a, rows.iter().find(|(r, _)| *r == a.get()).map(|(_, t)| *t)))
        .collect();
    select_winner(&entries).unwrap()
}

fn published_triple_ranking() -> Outcome {
    let tariffs = ["monochromic", "day", "peak", "night"];
    let window_2011_2014: [[ErrorTriple; 3]; 4] = [
        [triple(1.04584, 0.00274, 3.15251e-05), triple(1.69263, 0.00452, 7.14024e-05), triple(2.85416, 0.00746, 7.7079e-05)],
        [triple(1.03415, 0.00256, 2.74256e-05), triple(1.69190, 0.00426, 6.31615e-05), triple(2.82190, 0.00694, 6.82629e-05)],
        [triple(1.10278, 0.00425, 7.82635e-05), triple(1.69556, 0.00669, 0.00016), triple(3.01593, 0.01163, 0.00017)],
        [triple(0.94636, 0.00140, 9.38699e-05), triple(1.66888, 0.00249, 2.3164e-05), triple(3.23215, 0.00464, 2.76252e-05)],
    ];
    let window_2007_2014: [[ErrorTriple; 3]; 4] = [
        [triple(1.54134, 0.00325, 4.16305e-05), triple(1.88821, 0.00415, 6.71492e-05), triple(1.22902, 0.00277, 5.49804e-05)],
        [triple(1.53563, 0.00305, 3.64137e-05), triple(1.83107, 0.00374, 5.34814e-05), triple(1.22134, 0.00259, 4.83688e-05)],
        [triple(1.57967, 0.00493, 9.94564e-05), triple(1.87624, 0.00604, 0.000141895), triple(1.26501, 0.00422, 0.000127408)],
        [triple(2.00233, 0.00239, 1.79968e-05), triple(2.06330, 0.00249, 2.45896e-05), triple(1.46693, 0.00184, 2.39453e-05)],
    ];
    let window_2007_2016: [[ErrorTriple; 3]; 4] = [
        [triple(1.41103, 0.00307, 3.86525e-05), triple(1.63246, 0.00361, 5.29207e-05), triple(1.05792, 0.00241, 4.73285e-05)],
        [triple(1.46192, 0.00305, 3.64243e-05), triple(1.69036, 0.00358, 4.85419e-05), triple(1.09139, 0.00239, 4.50851e-05)],
        [triple(1.48033, 0.00480, 9.52708e-05), triple(1.69904, 0.00563, 0.00012), triple(1.12524, 0.00385, 0.00011)],
        [triple(1.80495, 0.00228, 1.80295e-05), triple(1.94033, 0.00247, 2.36791e-05), triple(1.33358, 0.00174, 2.29849e-05)],
    ];
    for (k, tariff) in tariffs.iter().enumerate() {
        let [hw, double, reg] = window_2011_2014[k];
        let w = inject(&[(17, hw), (14, double), (9, reg)]);
        check(w == id(17), format!("2011-2014 {tariff}: winner {w}, expected 17"))?;
        for (label, table) in [("2007-2014", &window_2007_2014), ("2007-2016", &window_2007_2016)] {
            let [hw, double, arima] = table[k];
            let w = inject(&[(17, hw), (14, double), (19, arima)]);
            check(w == id(19), format!("{label} {tariff}: winner {w}, expected 19"))?;
        }
    }
    Ok("Holt-Winters s=12 wins all four 2011-2014 tariffs; ARIMA wins all four for 2007-2014 and 2007-2016".into())
}

fn synthetic_recovery() -> Outcome {
    let pattern: Vec<f64> = (0..12).map(|j| 1.0 + 0.04 * (std::f64::consts::TAU * j as f64 / 12.0).sin()).collect();
    let values: Vec<f64> = (0..108).map(|t| (0.2 + 0.001 * t as f64) * pattern[t % 12]).collect();
    let full = series(values);
    let train_end = ym(2018, 12);
    let config = TournamentConfig::default();
    let t0 = Instant::now();
    let mut details = Vec::new();
    for (row, label) in [(17, "holt-winters"), (1, "decomposition"), (5, "decomposition-cma"), (9, "regression")] {
        let report = validate_holdout(&full, train_end, id(row), &config).map_err(|e| format!("{label}: {e}"))?;
        check(report.rows.len() == 12, format!("{label}: {} holdout rows", report.rows.len()))?;
        check(report.errors.mape < 1.0, format!("{label}: holdout MAPE {:.5}%", report.errors.mape))?;
        details.push(format!("{label} {:.5}%", report.errors.mape));
    }
    let elapsed = t0.elapsed();
    within(elapsed, 5.0)?;
    Ok(format!("{} in {:.3}s", details.join(", "), elapsed.as_secs_f64()))
}

fn ses_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let config = TournamentConfig::default();
    for case in 0..100 {
        let n = rng.random_range(12..72);
        let mut level = rng.random_range(0.1..1.0);
        let values: Vec<f64> = (0..n)
            .map(|_| {
                level = f64::max(level + rng.random_range(-0.05..0.05), 0.01);
                level
            })
            .collect();
        let s = series(values);
        let a = run_approach(id(11), &s, 12, &config).map_err(|e| e.to_string())?;
        let b = run_approach(id(12), &s, 12, &config).map_err(|e| e.to_string())?;
        let same = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap()
            && a.forecasts.iter().zip(&b.forecasts).all(|(x, y)| x.to_bits() == y.to_bits())
            && a.fitted.iter().zip(&b.fitted).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits));
        check(same, format!("case {case}: rows 11 and 12 differ"))?;
    }
    Ok("100 series bit-identical".into())
}

fn simulate_arma(seed: u64, n: usize, ar: &[f64], ma: &[f64], seasonal_ma: (usize, f64), mean: f64) -> Vec<f64> {
    let burn = 200;
    let e = noise(seed, n + burn, 1.0);
    let (s, theta_s) = seasonal_ma;
    let mut z = vec![0.0; n + burn];
    for t in 0..n + burn {
        let mut v = e[t];
        for (i, phi) in ar.iter().enumerate() {
            if t > i {
                v += phi * z[t - i - 1];
            }
        }
        for (i, theta) in ma.iter().enumerate() {
            if t > i {
                v -= theta * e[t - i - 1];
            }
        }
        if s > 0 && t >= s {
            v -= theta_s * e[t - s];
        }
        z[t] = v;
    }
    z[burn..].iter().map(|v| v + mean).collect()
}

fn css_at(s: &TimeSeries, order: ArimaOrder, coefs: &[f64], mean: f64) -> Option<f64> {
    let model = ArimaModel::with_coefficients(order, coefs[..order.p].to_vec(), coefs[order.p..].to_vec(), vec![], vec![], mean).ok()?;
    let r = css_residuals(s, &model).ok()?;
    Some(r.iter().map(|e| e * e).sum())
}

fn arima_estimation() -> Outcome {
    let t0 = Instant::now();

    let ar = series(simulate_arma(7, 400, &[0.7], &[], (0, 0.0), 5.0));
    let fit = fit_arima(&ar, ArimaOrder::nonseasonal(1, 0, 0)).map_err(|e| e.to_string())?;
    check((fit.ar[0] - 0.7).abs() <= 0.08, format!("AR(1) estimate {:.4}", fit.ar[0]))?;

    let sma = series(simulate_arma(12, 480, &[], &[], (12, 0.6), 5.0));
    let order = ArimaOrder::new((0, 0, 0), (0, 0, 1), 12).unwrap();
    let fit_s = fit_arima(&sma, order).map_err(|e| e.to_string())?;
    check(
        (fit_s.seasonal_ma[0] - 0.6).abs() <= 0.10,
        format!("seasonal MA estimate {:.4}", fit_s.seasonal_ma[0]),
    )?;

    let walk: Vec<f64> = noise(3, 60, 0.01).iter().scan(0.3, |acc, e| {
        *acc += e;
        Some(*acc)
    }).collect();
    let walk = series(walk);
    let rw = fit_arima(&walk, ArimaOrder::nonseasonal(0, 1, 0)).map_err(|e| e.to_string())?;
    let fc = forecast_arima(&walk, &rw, 12).map_err(|e| e.to_string())?;
    let last = *walk.values().last().unwrap();
    check(fc.forecasts.iter().all(|f| *f == last), "(0,1,0) forecasts differ from the last observation")?;

    let grid: Vec<f64> = (-19..=19).map(|k| k as f64 * 0.05).collect();
    let orders = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = f64::NEG_INFINITY;
    for case in 0..20u64 {
        let (gen_ar, gen_ma) = match case % 4 {
            0 => (vec![rng.random_range(-0.8..0.8)], vec![]),
            1 => (vec![], vec![rng.random_range(-0.8..0.8)]),
            2 => (vec![rng.random_range(-0.7..0.7)], vec![rng.random_range(-0.7..0.7)]),
            _ => (vec![rng.random_range(0.2..0.6), rng.random_range(-0.3..0.3)], vec![]),
        };
        let s = series(simulate_arma(100 + case, 150, &gen_ar, &gen_ma, (0, 0.0), 1.0));
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        for &(p, q) in &orders {
            let order = ArimaOrder::nonseasonal(p, 0, q);
            let fit = fit_arima(&s, order).map_err(|e| format!("case {case} {order}: {e}"))?;
            let mut best = f64::INFINITY;
            let k = p + q;
            let mut idx = vec![0usize; k];
            loop {
                let coefs: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
                if let Some(v) = css_at(&s, order, &coefs, mean) {
                    best = best.min(v);
                }
                let mut pos = 0;
                while pos < k {
                    idx[pos] += 1;
                    if idx[pos] < grid.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
            let gap = (fit.css - best) / best;
            worst = worst.max(gap);
            check(
                fit.css <= best * (1.0 + 1e-9),
                format!("case {case} {order}: CSS {:.8} above grid optimum {:.8}", fit.css, best),
            )?;
        }
    }
    let elapsed = t0.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!(
        "AR(1) {:.4}, seasonal MA {:.4}, 100 grid scans (largest relative gap {:.2e}) in {:.3}s",
        fit.ar[0],
        fit_s.seasonal_ma[0],
        worst,
        elapsed.as_secs_f64()
    ))
}

fn order_selection() -> Outcome {
    // Seed 2 is a fixed draw; AIC does not pick the generator on every draw.
    let walk: Vec<f64> = noise(2, 96, 0.01).iter().scan(0.3, |acc, e| {
        *acc += e;
        Some(*acc)
    }).collect();
    let order = select_arima_order(&series(walk), 12).map_err(|e| e.to_string())?;
    check((order.p, order.d, order.q) == (0, 1, 0), format!("selected {order}"))?;
    let grid = candidate_orders(12);
    let target = ArimaOrder::new((0, 1, 0), (0, 0, 1), 12).unwrap();
    check(grid.len() == 72, format!("grid has {} orders", grid.len()))?;
    check(grid.contains(&target), "grid lacks (0,1,0)(0,0,1)_12")?;
    Ok(format!("selected {order}; grid of 72 contains {target}"))
}

fn index_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..500 {
        let period = if rng.random_bool(0.5) { 12 } else { 4 };
        let n = rng.random_range(2 * period + 1..=96);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        let start = ym(rng.random_range(2000..2020), rng.random_range(1..=12));
        let s = TimeSeries::new(start, values.clone()).unwrap();
        let c = rng.random_range(0.1..10.0);
        let scaled = TimeSeries::new(start, values.iter().map(|v| v * c).collect()).unwrap();
        let shifted = TimeSeries::new(start, values.iter().map(|v| v + c).collect()).unwrap();
        for method in [IndexMethod::Standard, IndexMethod::CenteredMovingAverage] {
            let mult = seasonal_indices(&s, period, Composition::Multiplicative, method).map_err(|e| e.to_string())?;
            let add = seasonal_indices(&s, period, Composition::Additive, method).map_err(|e| e.to_string())?;
            let mult_sum: f64 = mult.indices.iter().sum();
            let add_sum: f64 = add.indices.iter().sum();
            check((mult_sum - period as f64).abs() <= 1e-12, format!("case {case}: multiplicative sum {mult_sum}"))?;
            check(add_sum.abs() <= 1e-12, format!("case {case}: additive sum {add_sum}"))?;

            let mult_c = seasonal_indices(&scaled, period, Composition::Multiplicative, method).unwrap();
            let add_c = seasonal_indices(&shifted, period, Composition::Additive, method).unwrap();
            let scale_ok = mult.indices.iter().zip(&mult_c.indices).all(|(a, b)| (a - b).abs() <= 1e-10);
            let shift_ok = add.indices.iter().zip(&add_c.indices).all(|(a, b)| (a - b).abs() <= 1e-10);
            check(scale_ok, format!("case {case}: multiplicative indices change under scaling"))?;
            check(shift_ok, format!("case {case}: additive indices change under shifting"))?;
        }
    }
    Ok("500 series, both index methods".into())
}

fn ols_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let x = if case % 2 == 0 {
            let period = if rng.random_bool(0.5) { 12 } else { 4 };
            let n = rng.random_range(period + 2..=120);
            build_design_matrix(n, period, rng.random_range(1..=period)).unwrap()
        } else {
            let cols = rng.random_range(1..=8);
            let rows = rng.random_range(cols + 1..=60);
            DMatrix::from_fn(rows, cols, |_, _| normal.sample(&mut rng))
        };
        let y: Vec<f64> = (0..x.nrows()).map(|_| normal.sample(&mut rng)).collect();
        let fit = fit_least_squares(&x, &y).map_err(|e| format!("case {case}: {e}"))?;
        let orth = normalized_orthogonality(&x, &y, &fit.residuals);
        worst = worst.max(orth);
        check(orth < 1e-8, format!("case {case}: normalized |X'r| = {orth:e}"))?;
    }

    for period in [4usize, 12] {
        for case in 0..20 {
            let c0 = rng.random_range(0.05..1.0);
            let t0 = rng.random_range(-0.01..0.01);
            let betas: Vec<f64> = (0..period - 1).map(|_| rng.random_range(-0.1..0.1)).collect();
            let start = ym(2007, rng.random_range(1..=12));
            let n = rng.random_range(period + 2..=120);
            let values: Vec<f64> = (1..=n)
                .map(|t| {
                    let season = start.add_months(t as i64 - 1).season(period) + 1;
                    let dummy = if season > 1 { betas[season - 2] } else { 0.0 };
                    c0 + t0 * t as f64 + dummy
                })
                .collect();
            let model = fit_regression(&TimeSeries::new(start, values).unwrap(), period).map_err(|e| e.to_string())?;
            let ok = (model.intercept - c0).abs() <= 1e-8
                && (model.trend - t0).abs() <= 1e-8
                && model.dummies.iter().zip(&betas).all(|(a, b)| (a - b).abs() <= 1e-8);
            check(ok, format!("s={period} case {case}: generator not recovered"))?;
        }
    }
    Ok(format!("200 designs, worst normalized |X'r| {worst:.2e}; 40 noiseless generators recovered"))
}

fn report_bytes(full: &TimeSeries, train_end: YearMonth, parallel: bool) -> Result<String, String> {
    let config = TournamentConfig { parallel, ..TournamentConfig::default() };
    let train = full.truncate_at(train_end).map_err(|e| e.to_string())?;
    let tournament = run_tournament(&train, &config).map_err(|e| e.to_string())?;
    let validation = validate_holdout(full, train_end, tournament.winner, &config).map_err(|e| e.to_string())?;
    serde_json::to_string(&(tournament, validation)).map_err(|e| e.to_string())
}

fn determinism_and_speed() -> Outcome {
    let e = noise(9, 108, 0.002);
    let values: Vec<f64> = (0..108)
        .map(|t| (0.2 + 0.001 * t as f64) * (1.0 + 0.03 * (std::f64::consts::TAU * t as f64 / 12.0).cos()) + e[t])
        .collect();
    let full = series(values);
    let train_end = ym(2018, 12);

    let t0 = Instant::now();
    let first = report_bytes(&full, train_end, true)?;
    let elapsed = t0.elapsed();
    within(elapsed, 10.0)?;
    let again = report_bytes(&full, train_end, true)?;
    let sequential = report_bytes(&full, train_end, false)?;
    check(first == again, "repeated runs differ")?;
    check(first == sequential, "parallel and sequential runs differ")?;
    Ok(format!("tournament + validation in {:.3}s; {} report bytes identical x3", elapsed.as_secs_f64(), first.len()))
}

fn sign_convention() -> Outcome {
    let actual: Vec<f64> = (0..12).map(|m| 0.25 + 0.002 * m as f64).collect();
    let forecast: Vec<f64> = actual.iter().enumerate().map(|(m, a)| if m < 3 { a * 0.967 } else { a * 1.02 }).collect();
    let report = ValidationReport::from_forecasts(None, ym(2015, 1), &actual, &forecast).map_err(|e| e.to_string())?;
    check(report.rows.len() == 12, "report does not have 12 rows")?;
    let negative: Vec<u8> = report.rows.iter().filter(|r| r.approx_error_pct < 0.0).map(|r| r.month.month()).collect();
    check(negative == [1, 2, 3], format!("negative entries in months {negative:?}"))?;
    check(report.rows.iter().skip(3).all(|r| r.approx_error_pct > 0.0), "non-positive entry after March")?;
    Ok(format!(
        "January {:.2}%, April {:.2}%",
        report.rows[0].approx_error_pct, report.rows[3].approx_error_pct
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("metric oracle equivalence", metric_oracle),
        ("published-triple ranking", published_triple_ranking),
        ("synthetic seasonal recovery", synthetic_recovery),
        ("SES seasonality invariance", ses_invariance),
        ("ARIMA estimation", arima_estimation),
        ("order selection sanity", order_selection),
        ("seasonal-index invariants", index_invariants),
        ("OLS correctness", ols_correctness),
        ("determinism and speed", determinism_and_speed),
        ("sign convention", sign_convention),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", n + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
