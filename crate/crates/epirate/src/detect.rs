//! Wave-arrival detection: the infection-rate (posterior-predictive)
//! detector and a GLR-Poisson surveillance baseline.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::CaseSeries;
use crate::error::{Error, Result};
use crate::forecast::{quantile, ForecastBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    InfectionRate,
    GlrPoisson,
}

/// Detector output for one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub detector_id: DetectorId,
    pub region_id: String,
    pub outlier_days: Vec<NaiveDate>,
    pub alarm_days: Vec<NaiveDate>,
    /// Outlier boundary aligned with the monitored days, counts/day.
    pub boundary: Vec<(NaiveDate, f64)>,
}

impl DetectionReport {
    /// Independent re-check of the alarm rule for the infection-rate
    /// detector: alarms are a subset of outliers, and each alarm day is the
    /// 3rd-or-later day of a run of >= 3 consecutive outlier days. GLR
    /// alarms come from the likelihood-ratio threshold instead and are not
    /// bound by the run rule.
    pub fn verify_run_rule(&self, run_length: usize) -> Result<()> {
        if self.detector_id != DetectorId::InfectionRate {
            return Ok(());
        }
        for alarm in &self.alarm_days {
            if !self.outlier_days.contains(alarm) {
                return Err(Error::InvalidInput(format!(
                    "alarm day {alarm} is not an outlier day"
                )));
            }
            for back in 1..run_length {
                let prev = *alarm - chrono::Duration::days(back as i64);
                if !self.outlier_days.contains(&prev) {
                    return Err(Error::InvalidInput(format!(
                        "alarm day {alarm} is not preceded by {} consecutive outliers",
                        run_length - 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Pointwise percentile (default 99th) of the noisy predictive samples.
///
/// Returns `(dates, boundary)` over the whole band; callers typically slice
/// to the forecast horizon. Fewer than 100 draws resolves the 99th
/// percentile poorly; the value is still computed and a flag is returned.
pub fn outlier_boundary(band: &ForecastBand, percentile: f64) -> (Vec<NaiveDate>, Vec<f64>, bool) {
    let poorly_resolved = band.samples.len() < 100;
    let boundary: Vec<f64> = (0..band.dates.len())
        .map(|day| {
            let col: Vec<f64> = band.samples.iter().map(|s| s[day]).collect();
            quantile(&col, percentile / 100.0)
        })
        .collect();
    (band.dates.clone(), boundary, poorly_resolved)
}

/// Mark outliers (observed count above the boundary) and alarms (3rd and
/// later days of each run of >= `run_length` consecutive outliers).
pub fn detect_alarms(
    observed: &CaseSeries,
    boundary_dates: &[NaiveDate],
    boundary: &[f64],
    run_length: usize,
) -> Result<DetectionReport> {
    if boundary_dates.len() != boundary.len() {
        return Err(Error::Alignment("boundary dates/values length mismatch".into()));
    }
    if observed.dates.len() != boundary_dates.len()
        || observed.dates.iter().zip(boundary_dates).any(|(a, b)| a != b)
    {
        return Err(Error::Alignment(
            "observed series and boundary are not aligned on dates".into(),
        ));
    }
    let mut outlier_days = Vec::new();
    let mut alarm_days = Vec::new();
    let mut run = 0usize;
    for (i, (&count, &bound)) in observed.counts.iter().zip(boundary).enumerate() {
        if count > bound {
            run += 1;
            outlier_days.push(observed.dates[i]);
            if run >= run_length {
                alarm_days.push(observed.dates[i]);
            }
        } else {
            run = 0;
        }
    }
    let report = DetectionReport {
        detector_id: DetectorId::InfectionRate,
        region_id: observed.region_id.clone(),
        outlier_days,
        alarm_days,
        boundary: boundary_dates.iter().copied().zip(boundary.iter().copied()).collect(),
    };
    report.verify_run_rule(run_length)?;
    Ok(report)
}

/// Seasonal log-linear Poisson mean model
/// `log(mu_t) = b0 + b1 t + b2 sin(w t) + b3 cos(w t)` with `w = 2 pi / 365`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlrModel {
    pub beta: [f64; 4],
    pub omega: f64,
    /// Harmonic count; fixed at 1 (single seasonal mode).
    pub harmonics: usize,
    pub c_gamma: f64,
    /// Date at which t = 0.
    pub origin: NaiveDate,
}

impl GlrModel {
    pub fn mean_at(&self, date: NaiveDate) -> f64 {
        let t = (date - self.origin).num_days() as f64;
        let wt = self.omega * t;
        (self.beta[0] + self.beta[1] * t + self.beta[2] * wt.sin() + self.beta[3] * wt.cos()).exp()
    }
}

pub const GLR_OMEGA: f64 = 2.0 * std::f64::consts::PI / 365.0;
pub const GLR_C_GAMMA: f64 = 3.0;

/// Poisson maximum-likelihood fit of the seasonal model via IRLS.
pub fn glr_fit(train: &CaseSeries) -> Result<GlrModel> {
    if train.len() < 30 {
        return Err(Error::InvalidInput(format!(
            "GLR training window has {} days, need >= 30",
            train.len()
        )));
    }
    if train.counts.iter().any(|&c| c < 0.0 || (c - c.round()).abs() > 1e-9) {
        return Err(Error::InvalidInput(
            "GLR training counts must be non-negative integers (raw, unsmoothed)".into(),
        ));
    }
    let total: f64 = train.counts.iter().sum();
    if total == 0.0 {
        return Err(Error::FitFailed(
            "all-zero training counts: Poisson likelihood is degenerate".into(),
        ));
    }
    let n = train.len();
    let origin = train.start();
    let design = DMatrix::from_fn(n, 4, |i, j| {
        let t = i as f64;
        match j {
            0 => 1.0,
            1 => t,
            2 => (GLR_OMEGA * t).sin(),
            _ => (GLR_OMEGA * t).cos(),
        }
    });
    let y = DVector::from_iterator(n, train.counts.iter().copied());

    let mut beta = DVector::zeros(4);
    beta[0] = (total / n as f64).max(1e-12).ln();
    let mut grad_norm = f64::INFINITY;
    for _ in 0..100 {
        let eta = &design * &beta;
        let mu = eta.map(|e| e.exp());
        let grad = design.transpose() * (&y - &mu);
        grad_norm = grad.norm();
        if grad_norm < 1e-8 {
            return Ok(GlrModel {
                beta: [beta[0], beta[1], beta[2], beta[3]],
                omega: GLR_OMEGA,
                harmonics: 1,
                c_gamma: GLR_C_GAMMA,
                origin,
            });
        }
        // Fisher scoring step: (X^T diag(mu) X)^-1 X^T (y - mu)
        let mut xtwx = DMatrix::zeros(4, 4);
        for i in 0..n {
            let row = design.row(i);
            for a in 0..4 {
                for b in 0..4 {
                    xtwx[(a, b)] += mu[i] * row[a] * row[b];
                }
            }
        }
        let step = xtwx
            .lu()
            .solve(&grad)
            .ok_or_else(|| Error::FitFailed("singular IRLS system".into()))?;
        // damped if the step overshoots into overflow
        let mut scale = 1.0;
        loop {
            let cand = &beta + step.scale(scale);
            let max_eta = (&design * &cand).amax();
            if max_eta < 40.0 || scale < 1e-6 {
                beta = cand;
                break;
            }
            scale *= 0.5;
        }
    }
    Err(Error::FitFailed(format!(
        "Poisson IRLS did not converge in 100 iterations (gradient norm {grad_norm:.3e})"
    )))
}

fn poisson_quantile(mu: f64, p: f64) -> f64 {
    // accumulate the pmf; mu is modest here
    let mut cdf = 0.0;
    let mut pmf = (-mu).exp();
    let mut k = 0u64;
    loop {
        cdf += pmf;
        if cdf >= p || k > 1_000_000 {
            return k as f64;
        }
        k += 1;
        pmf *= mu / k as f64;
    }
}

/// GLR statistic for an upward level shift of the seasonal model on the
/// window `[l, d]`: with `Y = sum y_t` and `M = sum mu0_t`, the supremum of
/// the summed Poisson log-ratio over the shifted model is
/// `Y log(Y/M) - (Y - M)` for `Y > M`, else 0.
fn glr_window_stat(y_sum: f64, mu_sum: f64) -> f64 {
    if y_sum <= mu_sum || y_sum == 0.0 {
        0.0
    } else {
        y_sum * (y_sum / mu_sum).ln() - (y_sum - mu_sum)
    }
}

/// Run the GLR-Poisson change detector over a test window.
///
/// For each day `d`, the statistic is the max over candidate changepoints
/// `l <= d` of the supremum of the summed log likelihood ratio between the
/// base model and the level-shifted refit on `[l, d]`; days where it
/// exceeds `c_gamma` are alarms. Implied outliers are days whose count
/// exceeds the base model's 99th-percentile Poisson quantile (mirroring the
/// infection-rate boundary for comparability).
pub fn glr_detect(test: &CaseSeries, base: &GlrModel, c_gamma: f64) -> Result<DetectionReport> {
    let n = test.len();
    if n > 31 {
        return Err(Error::InvalidInput(format!(
            "GLR test window has {n} days, expected <= 31"
        )));
    }
    let mu0: Vec<f64> = test.dates.iter().map(|d| base.mean_at(*d)).collect();
    let boundary: Vec<f64> = mu0.iter().map(|&m| poisson_quantile(m, 0.99)).collect();

    let mut outlier_days = Vec::new();
    let mut alarm_days = Vec::new();
    for d in 0..n {
        if test.counts[d] > boundary[d] {
            outlier_days.push(test.dates[d]);
        }
        let mut stat = 0.0f64;
        let mut y_sum = 0.0;
        let mut mu_sum = 0.0;
        // walk changepoints from d back to the window start
        for l in (0..=d).rev() {
            y_sum += test.counts[l];
            mu_sum += mu0[l];
            stat = stat.max(glr_window_stat(y_sum, mu_sum));
        }
        if stat > c_gamma {
            alarm_days.push(test.dates[d]);
        }
    }
    Ok(DetectionReport {
        detector_id: DetectorId::GlrPoisson,
        region_id: test.region_id.clone(),
        outlier_days,
        alarm_days,
        boundary: test.dates.iter().copied().zip(boundary).collect(),
    })
}

/// Raw GLR statistic trace over the test window, for diagnostics/tests.
pub fn glr_statistics(test: &CaseSeries, base: &GlrModel) -> Vec<f64> {
    (0..test.len())
        .map(|d| {
            let mut stat = 0.0f64;
            let mut y_sum = 0.0;
            let mut mu_sum = 0.0;
            for l in (0..=d).rev() {
                y_sum += test.counts[l];
                mu_sum += base.mean_at(test.dates[l]);
                stat = stat.max(glr_window_stat(y_sum, mu_sum));
            }
            stat
        })
        .collect()
}
